import numpy as np
import pytest

from gaussfrontier.spectrum import GaussianModel


def random_joint(rng, n, rank=None, duplicate_rows=0):
    """Covariance of ``n`` variables from ``rank`` latent factors.

    ``duplicate_rows`` copies that many rows of the factor matrix onto others,
    producing exact linear dependencies.
    """
    rank = n if rank is None else rank
    # Singular values in [0.5, 2] keep the condition number moderate.
    q1, _ = np.linalg.qr(rng.normal(size=(n, n)))
    q2, _ = np.linalg.qr(rng.normal(size=(rank, rank)))
    t = q1[:, :rank] @ np.diag(rng.uniform(0.5, 2.0, size=rank)) @ q2
    for k in range(duplicate_rows):
        src, dst = rng.choice(n, size=2, replace=False)
        t[dst] = t[src]
    return t @ t.T


def random_model(rng, dx, dy, du, rank=None, duplicate_rows=0):
    n = dx + dy + du
    return GaussianModel(dx, dy, du, random_joint(rng, n, rank, duplicate_rows))


def random_invertible(rng, n):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return q @ np.diag(rng.uniform(0.5, 2.0, size=n))


def scalar_model(rho, var_x=1.0, var_y=1.0):
    c = rho * np.sqrt(var_x * var_y)
    return GaussianModel(1, 1, 0, np.array([[var_x, c], [c, var_y]]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
