"""
Reads configuration files and overlays them on the defaults
"""

import logging
from typing import Any, Callable, Optional

import yaml

logger = logging.getLogger("mqsp_logger")


def load_config_file(file_path: str, display: Callable[[str], None]) -> Optional[dict[str, Any]]:
    """Reads a YAML (or JSON) configuration file.

    Returns None, after reporting the problem through display, when the file is
    missing or malformed.
    """

    try:
        with open(file_path, "r", encoding="utf-8") as config_file:
            config_settings = yaml.safe_load(config_file)
    except FileNotFoundError:
        display(f"ERROR: The configuration file {file_path} does not exist.")
        return None
    except yaml.YAMLError:
        display(f"ERROR: Something is wrong with the configuration file {file_path}. Please fix it and try again.")
        return None

    if config_settings is None:
        return {}
    if not isinstance(config_settings, dict):
        display(f"ERROR: The configuration file {file_path} must hold a mapping of settings.")
        return None
    logger.debug("Loaded configuration: %s", file_path)
    return config_settings


def merge_config(base: dict[str, Any], loaded: dict[str, Any]) -> dict[str, Any]:
    """Overlays loaded settings on base, section by section. Unknown keys are kept and logged."""

    merged = dict(base)
    for key, value in loaded.items():
        if key not in base:
            logger.warning("Unknown configuration key: %s", key)
            merged[key] = value
        elif isinstance(base[key], dict) and isinstance(value, dict):
            merged[key] = merge_config(base[key], value)
        else:
            merged[key] = value
    return merged
