"""
Survey module

Runs the numerical search over many independent samples and tallies how many
of the converged polynomials are alternating products, and with which words.
"""

import logging
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd

from mqsptool.constants import SEARCH_CORNER_TOL, SEARCH_MATCH_TOL, SURVEY_ATTEMPT_FACTOR
from mqsptool.mqsp_alt import Verdict, corner_test
from mqsptool.mqsp_report import create_storage_table, storage_table_to_frame
from mqsptool.mqsp_search import SearchConfig, gradient_search, permutation_decompose

logger = logging.getLogger("mqsp_logger")

SURVEY_CHECKS = ["Converged", "CornerConsistent"]
SURVEY_COLUMNS = ["Objective", "Iterations", "Verdict", "Label", "Word", "CornerObstruction", "MatchResidual"]


@dataclass
class SurveyReport:
    """Tallies over converged samples; non-converged attempts are counted apart."""

    samples: int
    attempts: int = 0
    verdict_counts: dict[str, int] = field(default_factory=dict)
    word_counts: dict[str, int] = field(default_factory=dict)
    objective_stats: dict[str, float] = field(default_factory=dict)

    @property
    def non_converged(self) -> int:
        return self.attempts - self.samples

    @property
    def non_decomposable_fraction(self) -> float:
        if not self.samples:
            return 0.0
        return self.verdict_counts.get(Verdict.NOT_DECOMPOSABLE.value, 0) / self.samples

    def to_json(self) -> dict[str, Any]:
        return {
            "record": "summary",
            "samples": self.samples,
            "attempts": self.attempts,
            "non_converged": self.non_converged,
            "verdict_counts": dict(self.verdict_counts),
            "word_counts": dict(self.word_counts),
            "non_decomposable_fraction": self.non_decomposable_fraction,
            "objective_stats": dict(self.objective_stats),
        }


def survey_sample(
    cfg: SearchConfig,
    index: int,
    corner_tol: float = SEARCH_CORNER_TOL,
    match_tol: float = SEARCH_MATCH_TOL,
) -> dict[str, Any]:
    """One survey row; the random stream is derived from (seed, index) only."""
    rng = np.random.default_rng([cfg.seed, index])
    candidates = gradient_search(cfg, rng, max_candidates=1)
    row: dict[str, Any] = {
        "Sample": index,
        "Objective": None,
        "Iterations": None,
        "Verdict": None,
        "Label": None,
        "Word": None,
        "CornerObstruction": None,
        "MatchResidual": None,
        "Check_Converged": bool(candidates),
        "Check_CornerConsistent": True,
    }
    if not candidates:
        return row

    candidate = candidates[0]
    poly = candidate.polynomial
    corner = corner_test(poly, corner_tol)
    certificate = permutation_decompose(poly, cfg.d_a, cfg.d_b, match_tol)
    obstructed = corner.verdict is Verdict.NOT_DECOMPOSABLE
    row.update(
        {
            "Objective": candidate.objective,
            "Iterations": candidate.iterations,
            "Verdict": certificate.verdict.value,
            "Label": certificate.label,
            "Word": certificate.details.get("word"),
            "CornerObstruction": obstructed,
            "MatchResidual": certificate.residuals.get("match", certificate.residuals.get("best_match")),
            "Check_CornerConsistent": not (obstructed and certificate.verdict is Verdict.DECOMPOSABLE),
        }
    )
    return row


def summarize(results: pd.DataFrame) -> SurveyReport:
    """Verdict tallies, winning words and objective statistics of a survey frame"""
    converged = results[results["Check_Converged"]]
    report = SurveyReport(samples=len(converged), attempts=len(results))
    report.verdict_counts = {str(k): int(v) for k, v in Counter(converged["Verdict"]).items()}
    report.word_counts = {str(k): int(v) for k, v in Counter(converged["Word"].dropna()).items()}
    if len(converged):
        objectives = converged["Objective"].astype(float)
        report.objective_stats = {
            "min": float(objectives.min()),
            "mean": float(objectives.mean()),
            "max": float(objectives.max()),
        }
    return report


class SurveyRunner:
    """Runs a survey and reports through diagnostics and progress callbacks."""

    def __init__(
        self,
        settings: dict[str, Any],
        update_diagnostics: Optional[Callable[[str], None]] = None,
        update_progress: Optional[Callable[[float], None]] = None,
    ) -> None:
        self.settings = settings
        self.cfg = SearchConfig.from_settings(settings)
        self.update_diagnostics = update_diagnostics or (lambda message: None)
        self.update_progress = update_progress or (lambda value: None)

    def run(
        self, samples: Optional[int] = None, max_attempts: Optional[int] = None
    ) -> tuple[SurveyReport, pd.DataFrame]:
        """Draws samples in index order until `samples` of them converge or the attempt budget runs out.

        Rows are merged in sample order and the run stops at the same index
        whatever WORKERS is.
        """
        samples = int(samples if samples is not None else self.settings["SAMPLES"])
        budget = int(max_attempts if max_attempts is not None else SURVEY_ATTEMPT_FACTOR * samples)
        workers = int(self.settings.get("WORKERS", 1))
        tolerances = self.settings["TOLERANCES"]
        worker = partial(
            survey_sample,
            self.cfg,
            corner_tol=float(tolerances["CORNER"]),
            match_tol=float(tolerances["SEARCH_MATCH"]),
        )

        start_time = time.time()
        logger.info("Surveying %s samples with degrees (%s, %s)...", samples, self.cfg.d_a, self.cfg.d_b)
        self.update_diagnostics(f"\nSurveying {samples} samples with degrees ({self.cfg.d_a}, {self.cfg.d_b})...")

        storage_table = create_storage_table(SURVEY_CHECKS, SURVEY_COLUMNS)
        converged = 0
        next_index = 0
        pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
        try:
            while converged < samples and next_index < budget:
                batch = range(next_index, min(budget, next_index + max(samples - converged, workers)))
                rows = pool.map(worker, batch) if pool is not None else map(worker, batch)
                for row in rows:
                    if converged >= samples:
                        break
                    converged += bool(row["Check_Converged"])
                    self._store(storage_table, row, converged, samples)
                next_index = batch.stop
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)

        results = storage_table_to_frame(storage_table)
        report = summarize(results)
        self.update_progress(100)
        logger.info("Survey finished in %.1f seconds.", time.time() - start_time)
        logger.info("Verdicts: %s", report.verdict_counts)
        self.update_diagnostics(
            f"Converged {report.samples} of {report.attempts} attempts; non-decomposable fraction "
            f"{report.non_decomposable_fraction:.3f}"
        )
        if report.samples < samples:
            logger.warning("Only %s of %s samples converged within %s attempts.", report.samples, samples, budget)
        return report, results

    def _store(self, storage_table: dict[str, list], row: dict[str, Any], done: int, total: int) -> None:
        for column in storage_table:
            storage_table[column].append(row[column])
        self.update_progress(done / total * 100)
        logger.debug("sample %s: %s", row["Sample"], row["Label"])


def write_survey_records(results: pd.DataFrame, report: SurveyReport, path: str) -> None:
    """Line-delimited JSON: one record per sample, then the summary record."""
    records = results.assign(record="sample").to_json(orient="records", lines=True)
    summary = pd.DataFrame([report.to_json()]).to_json(orient="records", lines=True)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as output:
        output.write(records.rstrip("\n") + "\n")
        output.write(summary.rstrip("\n") + "\n")


def survey(cfg: SearchConfig, n_samples: int, workers: int = 1) -> tuple[SurveyReport, pd.DataFrame]:
    """Survey with default tolerances"""
    settings = {
        "RANDOM_SEED": cfg.seed,
        "SAMPLES": n_samples,
        "WORKERS": workers,
        "TOLERANCES": {"CORNER": SEARCH_CORNER_TOL, "SEARCH_MATCH": SEARCH_MATCH_TOL},
        "SEARCH": {
            "DA": cfg.d_a,
            "DB": cfg.d_b,
            "GRID_N": cfg.grid_n,
            "LEARNING_RATE": cfg.learning_rate,
            "MAX_ITER": cfg.max_iter,
            "THRESHOLD": cfg.threshold,
            "RESTARTS": cfg.restarts,
            "SYMMETRIC": cfg.symmetric,
        },
    }
    return SurveyRunner(settings).run()
