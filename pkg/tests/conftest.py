import warnings

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


@pytest.fixture
def grid():
    from quenchgap.response import time_grid

    return time_grid(500.0, 1000)


def max_dev(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


_ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record one verdict line per acceptance criterion; printed in the terminal summary."""

    def add(criterion, ok, detail):
        _ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE[criterion])
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for key in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[key])
