import numpy as np
import pytest

from spherosync.core import SignVector, SphereConfig, SymmetricCost


def symmetric_cost(rng, n, scale=1.0, zero_diag=True):
    """Random dense symmetric cost with Gaussian entries."""
    M = rng.standard_normal((n, n)) * scale
    M = (M + M.T) / 2
    if zero_diag:
        np.fill_diagonal(M, 0.0)
    return SymmetricCost(entries=M)


def hermitian_cost(rng, n, scale=1.0):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M = (M + M.conj().T) * (scale / 2)
    np.fill_diagonal(M, M.diagonal().real)
    return SymmetricCost(entries=M, is_complex=True)


def random_signs(rng, n):
    return SignVector(signs=np.where(rng.random(n) < 0.5, 1.0, -1.0))


def random_config(rng, n, r, is_complex=False):
    Y = rng.standard_normal((n, r))
    if is_complex:
        Y = Y + 1j * rng.standard_normal((n, r))
    return SphereConfig(rows=Y / np.linalg.norm(Y, axis=1)[:, None])


def complete_graph(n):
    return SymmetricCost(entries=np.ones((n, n)) - np.eye(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
