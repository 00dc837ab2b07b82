import json

import numpy as np
import pytest

from mqsptool.mqsp_laurent import laurent_to_json
from mqsptool.mqsp_uni import random_su2


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow statistical tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long statistical acceptance run")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def su2(rng):
    """Draws Haar-random SU(2) matrices from the seeded stream"""
    return lambda: random_su2(rng)


@pytest.fixture
def write_json(tmp_path):
    """Writes a JSON document (polynomials are encoded first) and returns its path"""

    def _write(document, name="input.json"):
        if hasattr(document, "coeffs") and hasattr(document, "backend"):
            document = laurent_to_json(document)
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write
