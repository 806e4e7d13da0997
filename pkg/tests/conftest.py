import numpy as np
import pytest

from replica_portfolio import AssetPopulation, PopulationMoments

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(label, passed, detail)."""

    def record(label, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def two_asset_pop():
    return AssetPopulation(expected_return=[1.0, 2.0], unit_cost=[1.0, 1.0], variance=[1.0, 1.0])


@pytest.fixture
def two_asset_moments():
    return PopulationMoments(m_cc=1.0, m_rc=1.5, m_rr=2.5)


def random_population(rng, n):
    return AssetPopulation(
        expected_return=rng.uniform(0.5, 2.0, n),
        unit_cost=rng.uniform(0.1, 2.0, n),
        variance=rng.uniform(0.5, 3.0, n),
    )


def random_spd(rng, n, p=None):
    p = p or 3 * n
    x = rng.standard_normal((n, p)) / np.sqrt(n)
    return x @ x.T


def kkt_oracle(H, A, b):
    """Minimise (1/2) w^T H w s.t. A w = b via the dense bordered system.

    Returns (w, multipliers) with H w - A^T lam = 0.
    """
    n, m = H.shape[0], A.shape[0]
    K = np.zeros((n + m, n + m))
    K[:n, :n] = H
    K[:n, n:] = -A.T
    K[n:, :n] = A
    rhs = np.concatenate([np.zeros(n), b])
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]
