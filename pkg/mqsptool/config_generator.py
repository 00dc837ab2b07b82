"""Builds the run configuration from defaults and command-line options"""

import copy
from typing import Any, Optional

import yaml

from mqsptool.constants import (
    CORNER_TOL,
    FAMILY_GRID_RADIUS,
    FAMILY_GRID_SIZE,
    FAMILY_MAX_ITER,
    POLY_UNITARY_TOL,
    SEARCH_CORNER_TOL,
    SEARCH_LEARNING_RATE,
    SEARCH_MATCH_TOL,
    SEARCH_MAX_ITER,
    SEARCH_RESTARTS,
    SEARCH_THRESHOLD,
)


def create_blank_config() -> dict[str, Any]:
    """Creates a configuration holding every default"""

    config: dict[str, Any] = {}
    config["RUN_ID"] = "mqsp_run"
    config["RANDOM_SEED"] = 0
    config["BACKEND"] = "auto"  # follow the input document

    config["TOLERANCES"] = {}
    config["TOLERANCES"]["UNITARY"] = POLY_UNITARY_TOL
    config["TOLERANCES"]["ROUND_TRIP"] = 1e-8
    config["TOLERANCES"]["SEARCH_MATCH"] = SEARCH_MATCH_TOL
    config["TOLERANCES"]["CORNER"] = CORNER_TOL
    config["TOLERANCES"]["SEARCH_CORNER"] = SEARCH_CORNER_TOL

    config["SEARCH"] = {}
    config["SEARCH"]["DA"] = 2
    config["SEARCH"]["DB"] = 2
    config["SEARCH"]["GRID_N"] = None  # max(DA, DB)
    config["SEARCH"]["LEARNING_RATE"] = SEARCH_LEARNING_RATE
    config["SEARCH"]["MAX_ITER"] = SEARCH_MAX_ITER
    config["SEARCH"]["THRESHOLD"] = SEARCH_THRESHOLD
    config["SEARCH"]["RESTARTS"] = SEARCH_RESTARTS
    config["SEARCH"]["SYMMETRIC"] = True

    config["SAMPLES"] = 200
    config["WORKERS"] = 1

    config["FILE_PATHS"] = {}
    config["FILE_PATHS"]["INPUT"] = ""
    config["FILE_PATHS"]["OUTPUT"] = ""
    config["FILE_PATHS"]["OUTPUT_DIR"] = ""

    config["FAMILY"] = {}
    config["FAMILY"]["ALPHA0"] = "1+1i"
    config["FAMILY"]["K"] = 3.0
    config["FAMILY"]["GRID_SIZE"] = FAMILY_GRID_SIZE
    config["FAMILY"]["GRID_RADIUS"] = FAMILY_GRID_RADIUS
    config["FAMILY"]["MAX_ITER"] = FAMILY_MAX_ITER

    return config


def generate_configuration_from_cli(
    options: dict[str, Any], base: Optional[dict[str, Any]] = None, tol_key: str = "UNITARY"
) -> dict[str, Any]:
    """Overlays the given command-line options on a base configuration and returns the result.

    Args:
        options: click parameters; None means "not given"
        base: configuration to start from (defaults when omitted)
        tol_key: tolerance that --tol sets for the running command

    Returns:
        dict[str, Any]: resolved configuration
    """

    config = copy.deepcopy(base) if base is not None else create_blank_config()

    _add_run_settings(config, options)
    _add_file_paths(config, options)
    _add_tolerance(config, options, tol_key)
    _add_search_settings(config, options)
    _add_family_settings(config, options)

    return config


def _given(options: dict[str, Any], name: str) -> bool:
    return options.get(name) is not None


def _add_run_settings(config: dict[str, Any], options: dict[str, Any]) -> None:
    """Adds the run id, seed, backend, sample and worker counts."""

    for option, key in (("run_id", "RUN_ID"), ("backend", "BACKEND")):
        if _given(options, option):
            config[key] = str(options[option])
    for option, key in (("seed", "RANDOM_SEED"), ("samples", "SAMPLES"), ("workers", "WORKERS")):
        if _given(options, option):
            config[key] = int(options[option])


def _add_file_paths(config: dict[str, Any], options: dict[str, Any]) -> None:
    """Adds the input/output file paths."""

    for option, key in (("in_path", "INPUT"), ("out_path", "OUTPUT"), ("output_dir", "OUTPUT_DIR")):
        if _given(options, option):
            config["FILE_PATHS"][key] = str(options[option])


def _add_tolerance(config: dict[str, Any], options: dict[str, Any], tol_key: str) -> None:
    """Adds --tol to the tolerance used by the running command."""

    if _given(options, "tol"):
        config["TOLERANCES"][tol_key] = float(options["tol"])


def _add_search_settings(config: dict[str, Any], options: dict[str, Any]) -> None:
    """Adds the degree bounds and quadrature grid parameter."""

    for option, key in (("da", "DA"), ("db", "DB"), ("grid_n", "GRID_N"), ("restarts", "RESTARTS")):
        if _given(options, option):
            config["SEARCH"][key] = int(options[option])


def _add_family_settings(config: dict[str, Any], options: dict[str, Any]) -> None:
    """Adds the family parameters alpha0 and k."""

    if _given(options, "alpha0"):
        config["FAMILY"]["ALPHA0"] = str(options["alpha0"])
    if _given(options, "k"):
        config["FAMILY"]["K"] = float(options["k"])


def save_config(config: dict[str, Any], file_path: str) -> str:
    """Saves the configuration to a .yml file and returns the path written"""

    if not file_path.endswith((".yml", ".yaml")):
        file_path = file_path + ".yml"
    with open(file_path, "w", encoding="utf-8") as file:
        yaml.dump(config, file, sort_keys=False)
    return file_path
