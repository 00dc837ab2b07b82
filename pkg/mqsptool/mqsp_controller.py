"""
Controller module

Runs one command for the command-line front end: logging, input documents,
the algorithm call, the report envelope and the exit code.
"""

import json
import logging
import os
import time
from typing import Any, Callable, Optional

import click

from mqsptool.constants import EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, VERSION
from mqsptool.mqsp_alt import Verdict, build_alt_product, check_binec, solve_family, verify_f22_identities
from mqsptool.mqsp_errors import (
    BackendMismatchError,
    CapacityError,
    DecompositionError,
    DegreeLimitError,
    IdentityCheckError,
    MqspError,
    PolynomialFormatError,
)
from mqsptool.mqsp_hom import (
    HomBivariate,
    check_hom_conditions,
    decompose_homogeneous,
    nc_build_product,
    nc_check_conditions,
    synthesize_homogeneous,
)
from mqsptool.mqsp_laurent import Backend, MatLaurent1, MatLaurent2, laurent_from_json, laurent_to_json
from mqsptool.mqsp_search import SearchConfig, certify, gradient_search
from mqsptool.mqsp_survey import SurveyRunner, write_survey_records
from mqsptool.mqsp_uni import (
    PhaseSeq,
    UnitarySeq,
    build_product,
    build_xrotation_product,
    haah_decompose,
    rebuild,
    validate_univariate,
)
from mqsptool.validate_inputs import parse_complex

logger = logging.getLogger("mqsp_logger")

VERDICT_EXIT_CODES = {
    Verdict.DECOMPOSABLE: EXIT_OK,
    Verdict.NOT_DECOMPOSABLE: EXIT_FAILED,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

# checked in order; the first matching type wins
ALGORITHM_EXIT_CODES = (
    (DegreeLimitError, EXIT_INCONCLUSIVE),
    (CapacityError, EXIT_INCONCLUSIVE),
    (DecompositionError, EXIT_FAILED),
    (IdentityCheckError, EXIT_FAILED),
)
ALGORITHM_ERRORS = tuple(error_type for error_type, _ in ALGORITHM_EXIT_CODES)


class Controller:
    """Command controller"""

    def __init__(
        self,
        config: dict[str, Any],
        display: Optional[Callable[[str], None]] = None,
        degrees: Optional[tuple[int, int]] = None,
    ) -> None:
        self.config = config
        # explicit (d_a, d_b) for certify; the polynomial degrees otherwise
        self.degrees = degrees
        self._display = display or (lambda message: click.echo(message, err=True))

    # ======================== MISCELLANEOUS =============================================
    def setup_logging(self) -> None:
        """Sets up the log file in the output directory, when one is configured"""

        logger.handlers = []  # reset handlers for next run

        log_file_loc = self.config["FILE_PATHS"]["OUTPUT_DIR"]
        if not log_file_loc:
            return
        log_file_name = self.config["RUN_ID"]
        file_handler = logging.FileHandler(os.path.join(log_file_loc, f"{log_file_name}.log"), "w")

        file_handler.setFormatter(logging.Formatter("%(message)s"))
        file_handler.setLevel(logging.DEBUG)  # log file gets everything
        logger.addHandler(file_handler)

    def update_diagnostics(self, message: str) -> None:
        """Diagnostics go to stderr; stdout only carries the JSON artifact"""
        self._display(message)

    def update_progress(self, value: float) -> None:
        logger.debug("progress: %.0f%%", value)

    def read_input(self) -> Any:
        """Parses the input JSON document"""
        with open(self.config["FILE_PATHS"]["INPUT"], "r", encoding="utf-8") as input_file:
            try:
                return json.load(input_file)
            except json.JSONDecodeError as err:
                raise PolynomialFormatError(f"input is not valid JSON: {err}") from err

    def read_polynomial(self, nvars: int) -> Any:
        poly = laurent_from_json(self.read_input())
        if poly.nvars != nvars:
            raise PolynomialFormatError(f"expected a {nvars}-variable polynomial, got {poly.nvars}")
        backend = self.config["BACKEND"]
        if backend == Backend.FLOAT.value:
            return poly.to_float()
        if backend == Backend.EXACT.value and poly.backend is not Backend.EXACT:
            raise BackendMismatchError("--backend exact needs a document with exact coefficients")
        return poly

    def write_output(self, command: str, result: dict[str, Any], exit_code: int) -> None:
        """Writes the report envelope to --out, or to stdout"""
        document = {
            "version": VERSION,
            "command": command,
            "exit_code": exit_code,
            "config": self.config,
            "result": result,
        }
        text = json.dumps(document, indent=2) + "\n"
        output_path = self.config["FILE_PATHS"]["OUTPUT"]
        if output_path:
            with open(output_path, "w", encoding="utf-8") as output_file:
                output_file.write(text)
            self.update_diagnostics(f"Report written to {output_path}")
        else:
            click.echo(text, nl=False)

    # ======================== EXECUTE COMMANDS =============================================
    def run_command(self, command: str) -> int:
        """Runs a command and returns its exit code.

        Algorithm errors on well-formed input are reported in the envelope with
        exit code 2 or 3; format, IO and backend errors become usage errors.
        """

        self.setup_logging()
        start_time = time.time()
        logger.info("mqsptool v%s: %s", VERSION, command)
        handler = getattr(self, "_" + command.replace("-", "_"))
        try:
            result, exit_code = handler()
        except ALGORITHM_ERRORS as err:
            exit_code = next(code for error_type, code in ALGORITHM_EXIT_CODES if isinstance(err, error_type))
            logger.warning("%s stopped: %s", command, err)
            self.update_diagnostics(f"{command}: {err}")
            result = {"error": {"type": type(err).__name__, "message": str(err), "step": getattr(err, "step", None)}}
        except (MqspError, ValueError, KeyError, TypeError, OSError) as err:
            logger.error("%s failed: %s", command, err)
            raise click.ClickException(f"{command}: {err}") from err
        self.write_output(command, result, exit_code)
        logger.info("%s finished in %.2f seconds with exit code %s", command, time.time() - start_time, exit_code)
        return exit_code

    @property
    def unitary_tol(self) -> float:
        return float(self.config["TOLERANCES"]["UNITARY"])

    @staticmethod
    def _report_exit(report: Any) -> int:
        return EXIT_OK if report.passed else EXIT_FAILED

    def _synth_uni(self) -> tuple[dict[str, Any], int]:
        document = self.read_input()
        if isinstance(document, dict) and "phis" in document:
            poly, report = build_xrotation_product(PhaseSeq(tuple(document["phis"])))
            degree = len(document["phis"]) - 1
        else:
            seq = UnitarySeq.from_json(document)
            poly, degree = build_product(seq), seq.degree
            report = validate_univariate(poly, degree, self.unitary_tol)
        result = {"polynomial": laurent_to_json(poly), "report": report.to_dict(), "d": degree}
        return result, self._report_exit(report)

    def _decomp_uni(self) -> tuple[dict[str, Any], int]:
        poly: MatLaurent1 = self.read_polynomial(1)
        report = validate_univariate(poly, poly.degree, self.unitary_tol)
        if not report.passed:
            self.update_diagnostics(f"Necessary properties fail: {', '.join(report.failed_checks())}")
            return {"report": report.to_dict()}, EXIT_FAILED
        dec = haah_decompose(poly)
        residual = rebuild(dec).max_difference(poly)
        return {"decomposition": dec.to_json(residual), "report": report.to_dict()}, EXIT_OK

    def _synth_hom(self) -> tuple[dict[str, Any], int]:
        document = self.read_input()
        seq = UnitarySeq.from_json(document)
        if "n" in document:
            nc_poly = nc_build_product(seq, int(document["n"]))
            report = nc_check_conditions(nc_poly)
            return {"polynomial": nc_poly.to_json(), "report": report.to_dict()}, self._report_exit(report)
        poly = synthesize_homogeneous(seq)
        report = check_hom_conditions(poly, tol=self.unitary_tol)
        return {"polynomial": laurent_to_json(poly.to_laurent2()), "report": report.to_dict()}, self._report_exit(
            report
        )

    def _decomp_hom(self) -> tuple[dict[str, Any], int]:
        laurent: MatLaurent2 = self.read_polynomial(2)
        report = check_hom_conditions(laurent, tol=self.unitary_tol)
        if not report.passed:
            self.update_diagnostics(f"Homogeneous conditions fail: {', '.join(report.failed_checks())}")
            return {"report": report.to_dict()}, EXIT_FAILED
        poly = HomBivariate.from_laurent2(laurent)
        seq = decompose_homogeneous(poly)
        residual = synthesize_homogeneous(seq).to_laurent2().max_difference(laurent)
        return {"sequence": seq.to_json(), "residual": residual, "report": report.to_dict()}, EXIT_OK

    def _synth_alt(self) -> tuple[dict[str, Any], int]:
        seq = UnitarySeq.from_json(self.read_input())
        poly = build_alt_product(seq)
        word = seq.assignment or ""
        report = check_binec(poly, word.count("a"), word.count("b"), self.unitary_tol)
        return {"polynomial": laurent_to_json(poly), "report": report.to_dict()}, self._report_exit(report)

    def _certify(self) -> tuple[dict[str, Any], int]:
        poly: MatLaurent2 = self.read_polynomial(2)
        d_a, d_b = self.degrees if self.degrees is not None else (poly.deg_a, poly.deg_b)
        tolerances = self.config["TOLERANCES"]
        report, certificate = certify(
            poly,
            d_a,
            d_b,
            corner_tol=float(tolerances["CORNER"]),
            match_tol=float(tolerances["SEARCH_MATCH"]),
            round_trip_tol=float(tolerances["ROUND_TRIP"]),
            unitary_tol=self.unitary_tol,
        )
        self.update_diagnostics(f"Verdict: {certificate.label} ({certificate.method.value})")
        return {"report": report.to_dict(), "certificate": certificate.to_json()}, VERDICT_EXIT_CODES[
            certificate.verdict
        ]

    def _verify_f22(self) -> tuple[dict[str, Any], int]:
        try:
            report = verify_f22_identities()
        except IdentityCheckError as err:
            self.update_diagnostics(str(err))
            return {"failed": err.identity}, EXIT_FAILED
        return {"report": report.to_dict()}, EXIT_OK

    def _solve_family(self) -> tuple[dict[str, Any], int]:
        family = self.config["FAMILY"]
        members = solve_family(
            parse_complex(family["ALPHA0"]),
            float(family["K"]),
            grid_size=int(family["GRID_SIZE"]),
            radius=float(family["GRID_RADIUS"]),
            max_iter=int(family["MAX_ITER"]),
            workers=int(self.config["WORKERS"]),
        )
        self.update_diagnostics(f"Found {len(members)} solution(s).")
        return {"solutions": [member.to_json() for member in members]}, EXIT_OK if members else EXIT_INCONCLUSIVE

    def _search(self) -> tuple[dict[str, Any], int]:
        cfg = SearchConfig.from_settings(self.config)
        candidates = gradient_search(cfg)
        self.update_diagnostics(f"{len(candidates)} of {cfg.restarts} restarts converged.")
        result = {
            "candidates": [
                {
                    "restart": candidate.restart,
                    "objective": candidate.objective,
                    "iterations": candidate.iterations,
                    "P": laurent_to_json(candidate.p),
                    "Q": laurent_to_json(candidate.q),
                    "polynomial": laurent_to_json(candidate.polynomial),
                }
                for candidate in candidates
            ]
        }
        return result, EXIT_OK if candidates else EXIT_INCONCLUSIVE

    def _survey(self) -> tuple[dict[str, Any], int]:
        settings = dict(self.config)
        settings["TOLERANCES"] = dict(self.config["TOLERANCES"], CORNER=self.config["TOLERANCES"]["SEARCH_CORNER"])
        runner = SurveyRunner(settings, self.update_diagnostics, self.update_progress)
        report, results = runner.run()
        output_dir = self.config["FILE_PATHS"]["OUTPUT_DIR"]
        if output_dir:
            records_path = os.path.join(output_dir, f"{self.config['RUN_ID']}_survey.jsonl")
            write_survey_records(results, report, records_path)
            self.update_diagnostics(f"Survey records written to {records_path}")
        return {"summary": report.to_json()}, EXIT_OK if report.samples else EXIT_INCONCLUSIVE
