import sys

import numpy as np
import pytest

from nsp_outflow import (
    BoundaryData,
    FarField,
    GasParameters,
    build_composite,
    transonic_point,
)

CANONICAL = dict(A=1.0 / 3.0, gamma=3.0, rho_plus=1.0, u_plus=0.2, u_b=-0.8)


@pytest.fixture(scope="session")
def gas():
    return GasParameters(A=CANONICAL["A"], gamma=CANONICAL["gamma"])


@pytest.fixture(scope="session")
def far_field():
    return FarField(CANONICAL["rho_plus"], CANONICAL["u_plus"])


@pytest.fixture(scope="session")
def boundary():
    return BoundaryData(CANONICAL["u_b"])


@pytest.fixture(scope="session")
def corner(gas, far_field):
    return transonic_point(gas, far_field)


@pytest.fixture(scope="session")
def composite(gas, far_field, boundary):
    return build_composite(gas, far_field, boundary)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion lines after the run summary."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
