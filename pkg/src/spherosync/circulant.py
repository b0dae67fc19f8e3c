"""Closed-form spectra of k-nearest-neighbor circulant graphs.

A circulant graph on n nodes connecting each node to its k neighbors on
either side has adjacency eigenvalues given by the DFT of its convolution
symbol (a Dirichlet kernel):

    H_A[m] = sin((2k+1) pi m / n) / sin(pi m / n) - 1,   H_A[0] = 2k,
    H_L[m] = H_A[0] - H_A[m],

with the symmetry H_L[m] = H_L[n - m].  The linearization of the oscillator
dynamics at the first twisted state (angles 2 pi i / n) is the Laplacian of
the modulated adjacency A_ij cos(2 pi (i-j)/n), whose symbol is

    H_Lt[m] = -H_L[1] + (H_L[m-1] + H_L[m+1]) / 2;

H_Lt[1] > 0 means that twisted state is a stable equilibrium.  As n grows
with density 2k/n -> mu, H_L[m]/n converges to

    Hbar_L(mu)[m] = mu - sin(pi mu m) / (pi m),

and the Laplacian condition number converges (for mu >= 0.6) to
kappa(mu) = Hbar_L(mu)[2] / Hbar_L(mu)[1], a strictly decreasing function
whose crossing of 2 defines the critical density mu_c ~ 0.68.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect


def _validate(n: int, k: int) -> None:
    if k < 1:
        raise ValueError(f"need k >= 1, got k={k}")
    if n < 2 * k + 1:
        raise ValueError(f"need n >= 2k+1, got n={n}, k={k}")


def adjacency_symbol(n: int, k: int, m) -> np.ndarray | float:
    """H_A[m] for any integer m (vectorized); removable singularities at
    m = 0 mod n are evaluated analytically, never by small-denominator
    division."""
    m = np.asarray(m)
    at_zero = m % n == 0
    safe = np.where(at_zero, 1, m)
    ratio = np.sin((2 * k + 1) * np.pi * safe / n) / np.sin(np.pi * safe / n)
    vals = np.where(at_zero, float(2 * k), ratio - 1.0)
    return vals if vals.ndim else float(vals)


def laplacian_symbol(n: int, k: int, m) -> np.ndarray | float:
    """H_L[m] = 2k - H_A[m]."""
    return 2 * k - adjacency_symbol(n, k, m)


def twisted_symbol(n: int, k: int, m) -> np.ndarray | float:
    """Symbol of the twisted-state linearization Laplacian.

    H_Lt[m] = -H_L[1] + (H_L[m-1] + H_L[m+1]) / 2, from modulating the
    adjacency symbol by cos(2 pi i / n).
    """
    scalar = np.asarray(m).ndim == 0
    arr = np.atleast_1d(np.asarray(m))
    h1 = laplacian_symbol(n, k, 1)
    vals = -h1 + 0.5 * (
        np.asarray(laplacian_symbol(n, k, arr - 1)) + np.asarray(laplacian_symbol(n, k, arr + 1))
    )
    return float(vals[0]) if scalar else vals


@dataclass(frozen=True)
class CirculantSpectrum:
    """DFT spectra of one (n, k) circulant graph, indexed m = 0..floor(n/2)."""

    n: int
    k: int
    H_A: np.ndarray
    H_L: np.ndarray
    H_Ltilde: np.ndarray
    condition_number: float
    lambda2_twisted: float

    def laplacian_eigenvalues(self) -> np.ndarray:
        """All n Laplacian eigenvalues, expanding the H_L[m] = H_L[n-m]
        symmetry (for comparison against a dense eigensolver)."""
        return laplacian_symbol(self.n, self.k, np.arange(self.n))

    def twisted_eigenvalues(self) -> np.ndarray:
        """All n eigenvalues of the twisted-state linearization."""
        return twisted_symbol(self.n, self.k, np.arange(self.n))


def dft_spectrum(n: int, k: int) -> CirculantSpectrum:
    """Exact circulant spectra via the closed-form DFT coefficients.

    The condition number max H_L[m] / min H_L[m] over 1 <= m <= n/2 is found
    by a full scan; no assumption is made about which index attains either
    extremum.
    """
    _validate(n, k)
    half = np.arange(n // 2 + 1)
    H_A = adjacency_symbol(n, k, half)
    H_L = laplacian_symbol(n, k, half)
    H_Lt = twisted_symbol(n, k, half)
    interior = H_L[1:]
    cond = float(interior.max() / interior.min())
    return CirculantSpectrum(
        n=n,
        k=k,
        H_A=H_A,
        H_L=H_L,
        H_Ltilde=H_Lt,
        condition_number=cond,
        lambda2_twisted=float(H_Lt[1]) if len(H_Lt) > 1 else 0.0,
    )


def hbar_laplacian(mu: float, m) -> np.ndarray | float:
    """Density-limit Laplacian symbol Hbar_L(mu)[m] = mu - sin(pi mu m)/(pi m)."""
    m = np.asarray(m, dtype=float)
    at_zero = m == 0
    safe = np.where(at_zero, 1.0, m)
    vals = np.where(at_zero, 0.0, mu - np.sin(np.pi * mu * safe) / (np.pi * safe))
    return vals if vals.ndim else float(vals)


@dataclass(frozen=True)
class DensityLimit:
    """Limit spectrum data at density mu, with kappa = Hbar_L[2]/Hbar_L[1]."""

    mu: float
    kappa: float

    def hbar_l(self, m) -> np.ndarray | float:
        return hbar_laplacian(self.mu, m)


def limit_kappa(mu: float) -> float:
    """Limiting Laplacian condition-number ratio Hbar_L[2] / Hbar_L[1]."""
    if not 0 < mu <= 1:
        raise ValueError(f"density must lie in (0, 1], got {mu}")
    denom = hbar_laplacian(mu, 1)
    if denom == 0:
        raise ValueError(f"Hbar_L[1] vanishes at mu={mu}")
    return float(hbar_laplacian(mu, 2) / denom)


def density_limit(mu: float) -> DensityLimit:
    return DensityLimit(mu=mu, kappa=limit_kappa(mu))


@functools.lru_cache(maxsize=1)
def critical_density() -> float:
    """The density at which the limiting condition number crosses 2.

    Unique root of 2 Hbar_L(mu)[1] = Hbar_L(mu)[2] on [0.6, 1], located by
    bisection to absolute tolerance 1e-12.
    """
    f = lambda mu: 2 * hbar_laplacian(mu, 1) - hbar_laplacian(mu, 2)
    return float(bisect(f, 0.6, 1.0, xtol=1e-12))


@dataclass(frozen=True)
class StabilityRecord:
    condition_number: float
    lambda2_twisted: float
    predicts_spurious: bool
    exceeds_two: bool


def finite_size_stability(n: int, k: int) -> StabilityRecord:
    """Twisted-state stability prediction for one finite (n, k) graph.

    predicts_spurious is H_Lt[1] > 0 (the first twisted state is a stable
    non-synchronized equilibrium); exceeds_two records whether the
    Laplacian condition number is above the benign-landscape threshold 2.
    For large n at density >= 0.6 the two agree.
    """
    spec = dft_spectrum(n, k)
    return StabilityRecord(
        condition_number=spec.condition_number,
        lambda2_twisted=spec.lambda2_twisted,
        predicts_spurious=spec.lambda2_twisted > 0,
        exceeds_two=spec.condition_number > 2,
    )
