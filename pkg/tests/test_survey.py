import json

import pandas as pd
import pytest

from mqsptool import mqsp_survey
from mqsptool.config_generator import create_blank_config
from mqsptool.constants import SURVEY_ATTEMPT_FACTOR
from mqsptool.mqsp_report import create_storage_table, storage_table_to_frame
from mqsptool.mqsp_search import SearchConfig
from mqsptool.mqsp_survey import (
    SURVEY_CHECKS,
    SURVEY_COLUMNS,
    SurveyRunner,
    summarize,
    survey,
    survey_sample,
    write_survey_records,
)


def _frame(rows):
    storage_table = create_storage_table(SURVEY_CHECKS, SURVEY_COLUMNS)
    for row in rows:
        for column in storage_table:
            storage_table[column].append(row.get(column))
    return storage_table_to_frame(storage_table)


def _row(index, verdict, word=None, converged=True):
    return {
        "Sample": index,
        "Objective": 1e-13 if converged else None,
        "Iterations": 100,
        "Verdict": verdict if converged else None,
        "Label": verdict,
        "Word": word,
        "CornerObstruction": False,
        "MatchResidual": 1e-9,
        "Check_Converged": converged,
        "Check_CornerConsistent": True,
    }


def test_storage_table_adds_the_validity_column():
    results = _frame([_row(0, "decomposable", "abab"), _row(1, None, converged=False)])
    assert list(results.columns[:2]) == ["Sample", "SampleIsValid"]
    assert results["SampleIsValid"].tolist() == [True, False]


def test_summarize_counts_verdicts_and_words():
    results = _frame(
        [
            _row(0, "decomposable", "aabb"),
            _row(1, "decomposable", "aabb"),
            _row(2, "decomposable", "abab"),
            _row(3, "not-decomposable"),
            _row(4, None, converged=False),
        ]
    )
    report = summarize(results)
    assert report.samples == 4
    assert report.attempts == 5
    assert report.non_converged == 1
    assert report.verdict_counts == {"decomposable": 3, "not-decomposable": 1}
    assert sum(report.verdict_counts.values()) == report.samples
    assert report.word_counts == {"aabb": 2, "abab": 1}
    assert report.non_decomposable_fraction == pytest.approx(0.25)
    assert report.objective_stats["max"] == pytest.approx(1e-13)


def test_survey_records_are_line_delimited(tmp_path):
    results = _frame([_row(0, "decomposable", "baba"), _row(1, "not-decomposable")])
    path = tmp_path / "records" / "run_survey.jsonl"
    write_survey_records(results, summarize(results), str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0])["record"] == "sample"
    summary = json.loads(lines[-1])
    assert summary["record"] == "summary"
    assert summary["verdict_counts"] == {"decomposable": 1, "not-decomposable": 1}


def test_sample_stream_depends_only_on_seed_and_index():
    cfg = SearchConfig(restarts=1, max_iter=200, seed=11)
    first = survey_sample(cfg, 4)
    second = survey_sample(cfg, 4)
    assert first == second
    assert first["Sample"] == 4


def _fake_sample(cfg, index, corner_tol, match_tol):
    """Converges on odd indices only"""
    converged = index % 2 == 1
    return _row(index, "decomposable" if index % 4 == 1 else "not-decomposable", "abab", converged)


def _runner(**search):
    config = create_blank_config()
    config["RANDOM_SEED"] = 5
    config["SEARCH"].update(search)
    return config


def test_runner_keeps_drawing_until_enough_samples_converge(monkeypatch):
    monkeypatch.setattr(mqsp_survey, "survey_sample", _fake_sample)
    progress = []
    messages = []
    report, results = SurveyRunner(_runner(), messages.append, progress.append).run(samples=3)
    assert results["Sample"].tolist() == [0, 1, 2, 3, 4, 5]
    assert report.samples == 3
    assert report.attempts == 6
    assert report.non_converged == 3
    assert sum(report.verdict_counts.values()) == report.samples
    assert report.verdict_counts == {"decomposable": 2, "not-decomposable": 1}
    assert progress[-1] == 100
    assert messages


def test_runner_stops_at_the_attempt_budget(monkeypatch):
    monkeypatch.setattr(mqsp_survey, "survey_sample", lambda cfg, index, **_: _row(index, None, converged=False))
    report, results = SurveyRunner(_runner()).run(samples=2)
    assert len(results) == 2 * SURVEY_ATTEMPT_FACTOR
    assert report.samples == 0
    assert report.attempts == 2 * SURVEY_ATTEMPT_FACTOR
    assert report.verdict_counts == {}

    report, results = SurveyRunner(_runner()).run(samples=2, max_attempts=3)
    assert report.attempts == 3


def test_runner_reports_progress():
    progress = []
    report, results = SurveyRunner(_runner(RESTARTS=1, MAX_ITER=50), update_progress=progress.append).run(samples=2)
    assert isinstance(results, pd.DataFrame)
    assert results["Sample"].tolist() == list(range(len(results)))
    assert report.attempts == len(results) <= 2 * SURVEY_ATTEMPT_FACTOR
    assert report.samples == int(results["Check_Converged"].sum())
    assert sum(report.verdict_counts.values()) == report.samples
    assert progress[-1] == 100


@pytest.mark.slow
def test_survey_of_degree_two_polynomials():
    report, results = survey(SearchConfig(seed=2024), 200)
    assert report.samples == 200
    assert sum(report.verdict_counts.values()) == 200
    assert 0.05 <= report.non_decomposable_fraction <= 0.4
    decomposable = sum(report.word_counts.values())
    assert report.word_counts.get("aabb", 0) + report.word_counts.get("bbaa", 0) >= 0.5 * decomposable
    assert results["Check_CornerConsistent"].all()
