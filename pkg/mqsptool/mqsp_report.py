"""
Certificate report module

Check results of the necessary-condition tests, stored the same way for every
check: named boolean checks, worst residuals, and free-form details
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import pandas as pd

logger = logging.getLogger("mqsp_logger")


@dataclass
class CertificateReport:
    """Outcome of a property check. Failed properties are recorded, never raised."""

    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    def record(self, check: str, passed: bool, residual: Optional[float] = None) -> bool:
        """Stores one check result (and its worst residual) and returns it."""
        self.checks[check] = bool(passed)
        if residual is not None:
            self.residuals[check] = float(residual)
        if not passed:
            logger.debug("%s: check %s failed (residual %s)", self.name, check, residual)
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed_checks(self) -> list[str]:
        return [check for check, passed in self.checks.items() if not passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": dict(self.checks),
            "failed": self.failed_checks(),
            "residuals": dict(self.residuals),
            "details": self.details,
        }


def create_storage_table(check_names: list[str], extra_columns: list[str]) -> dict[str, list]:
    """Creates a table to store per-sample results."""

    storage_table: dict[str, list] = {"Sample": []}
    for column in extra_columns:
        storage_table[column] = []
    for check in check_names:
        storage_table[f"Check_{check}"] = []

    return storage_table


def storage_table_to_frame(storage_table: dict[str, list]) -> pd.DataFrame:
    """Builds the results frame with a leading SampleIsValid column."""

    results = pd.DataFrame(data=storage_table)
    check_columns = [col for col in results.columns if col.startswith("Check_")]
    if check_columns:
        results.insert(loc=1, column="SampleIsValid", value=results[check_columns].eq(True).all(axis=1))
    return results
