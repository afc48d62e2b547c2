import numpy as np
import pytest

from dopo.params import DopoParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def params_weak():
    """Weak coupling, moderately below threshold."""
    return DopoParams.from_sigma(0.8, chi=0.1)


@pytest.fixture
def params_strong():
    """Strong coupling at threshold; small truncations suffice."""
    return DopoParams.from_sigma(1.0, chi=1.0)


def random_density_matrix(rng, dim, rank=None):
    rank = rank or dim
    X = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = X @ X.conj().T
    return rho / np.trace(rho)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
