"""Shared fixtures: the bases are expensive enough to build once per session."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from isowell.model import DeformationParams, build_basis, classify_wells

settings.register_profile("isowell", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("isowell")

SYM = dict(nu=-3.0, mu=-3.02)
THREE = dict(nu=-0.02, mu=-1.0)


def params(lambda1=1.0, lambda2=1.0, **kw):
    base = dict(SYM)
    base.update(kw)
    return DeformationParams(lambda1=lambda1, lambda2=lambda2, **base)


@pytest.fixture(scope="session")
def sym_params():
    return params()


@pytest.fixture(scope="session")
def sym_basis(sym_params):
    return build_basis(sym_params, 10)


@pytest.fixture(scope="session")
def asym_basis():
    return build_basis(params(0.5), 10)


@pytest.fixture(scope="session")
def weak_basis():
    return build_basis(params(0.05), 10)


@pytest.fixture(scope="session")
def three_params():
    return params(**THREE)


@pytest.fixture(scope="session")
def three_basis(three_params):
    return build_basis(three_params, 10)


@pytest.fixture(scope="session")
def sym_wells(sym_params):
    return classify_wells(sym_params)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


# (criterion number, line) pairs collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
