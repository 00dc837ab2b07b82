"""Functions to validate the resolved configuration before a command runs"""

import os
from typing import Any, Callable

from mqsptool.mqsp_laurent import Backend
from mqsptool.mqsp_search import SearchConfig

# commands reading a polynomial or sequence document
INPUT_COMMANDS = {"synth-uni", "decomp-uni", "synth-hom", "decomp-hom", "synth-alt", "certify"}
SEARCH_COMMANDS = {"search", "survey"}


def _display_error_message(display: Callable[[str], None], message: str) -> None:
    """Displays an error message"""
    display(f"ERROR: {message}")


def parse_complex(text: Any) -> complex:
    """Parses numbers written as 1+1i, 1+1j or plain reals"""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    return complex(str(text).replace(" ", "").replace("i", "j"))


def validate_inputs(config: dict[str, Any], command: str, display: Callable[[str], None]) -> bool:
    """Validates the configuration prior to execution. Notifies the user
    if something is incorrect and prevents execution."""

    if (
        _validate_config(config, command, display)
        and _validate_tolerances(config, display)
        and _validate_search(config, command, display)
        and _validate_family(config, command, display)
    ):
        return True
    else:
        return False


def _validate_config(config: dict[str, Any], command: str, display: Callable[[str], None]) -> bool:
    """Checks the run id, backend, worker count and that input/output locations exist"""

    if config["RUN_ID"] == "":
        _display_error_message(display, "Please create a run id and try again.")
        return False

    if config["BACKEND"] not in ["auto"] + [backend.value for backend in Backend]:
        _display_error_message(display, f"Unknown backend '{config['BACKEND']}'. Use 'float', 'exact' or 'auto'.")
        return False

    if int(config["WORKERS"]) < 1:
        _display_error_message(display, "The number of workers must be at least 1.")
        return False

    output_dir = config["FILE_PATHS"]["OUTPUT_DIR"]
    if output_dir and not os.path.isdir(output_dir):
        _display_error_message(display, "The output directory does not exist. Please choose a valid directory.")
        return False

    if command in INPUT_COMMANDS:
        input_path = config["FILE_PATHS"]["INPUT"]
        if not input_path:
            _display_error_message(display, f"'{command}' needs an input document (--in).")
            return False
        if not os.path.exists(input_path):
            _display_error_message(display, f"The input file {input_path} does not exist or the path is incorrect.")
            return False

    return True


def _validate_tolerances(config: dict[str, Any], display: Callable[[str], None]) -> bool:
    """Checks every tolerance is a positive number"""

    for name, value in config["TOLERANCES"].items():
        try:
            positive = float(value) > 0
        except (TypeError, ValueError):
            positive = False
        if not positive:
            _display_error_message(display, f"Tolerance {name} must be a positive number, got {value!r}.")
            return False
    return True


def _validate_search(config: dict[str, Any], command: str, display: Callable[[str], None]) -> bool:
    """Checks the search section converts to a valid search configuration"""

    if command not in SEARCH_COMMANDS:
        return True
    try:
        SearchConfig.from_settings(config)
    except (KeyError, TypeError, ValueError) as err:
        _display_error_message(display, f"Invalid search settings: {err}")
        return False
    if command == "survey" and int(config["SAMPLES"]) < 1:
        _display_error_message(display, "The number of survey samples must be at least 1.")
        return False
    return True


def _validate_family(config: dict[str, Any], command: str, display: Callable[[str], None]) -> bool:
    """Checks alpha0 and k are nonzero numbers"""

    if command != "solve-family":
        return True
    family = config["FAMILY"]
    try:
        alpha0 = parse_complex(family["ALPHA0"])
        k = float(family["K"])
    except (TypeError, ValueError):
        _display_error_message(display, f"Cannot read alpha0 = {family['ALPHA0']!r}, k = {family['K']!r}.")
        return False
    if alpha0 == 0 or k == 0:
        _display_error_message(display, "alpha0 and k must be nonzero.")
        return False
    return True
