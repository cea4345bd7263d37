import sys
from fractions import Fraction as F

import pytest

from tfham.basis_series import BasisParams, NumericMode
from tfham.ham_engine import HamConfig, run
from tfham.reference_solver import find_initial_slope


@pytest.fixture(scope="session")
def order40():
    """Order-40 run at h=-4/5, alpha=3/4 (the converged analytic solution)."""
    return run(HamConfig(BasisParams(F(3, 4), 1, 1), F(-4, 5), 40, NumericMode.approx(128)))


@pytest.fixture(scope="session")
def reference():
    return find_initial_slope()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
