"""Core types and operations for synchronization on products of spheres.

The objects here are shared by every other module: a dense symmetric (or
Hermitian) cost matrix C, sign vectors z with entries on the unit circle,
configurations Y whose rows are unit vectors in R^r (or C^r), phase
vectors for the oscillator form, and the certificate Laplacian

    L(z) = ddiag(C z z^T) - C          (real)
    L(z) = Re(ddiag(C z z^*)) - C      (Hermitian)

together with its diagonally preconditioned version D^{-1/2} L D^{-1/2}.

Everything is dense (target sizes are a few thousand), all types are
immutable after construction, and every operation is a pure function, so
the module is safe for concurrent use.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

SYMMETRY_WARN_TOL = 1e-8


class RetractionSingularity(RuntimeError):
    """Raised when a retraction step hits a zero row; shrink the step."""


def _locked(a: np.ndarray) -> np.ndarray:
    """Own a copy of ``a`` and mark it read-only."""
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


def operator_norm(M: np.ndarray) -> float:
    """Spectral norm of a symmetric/Hermitian matrix (max |eigenvalue|)."""
    if M.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(M)).max())


@dataclass(frozen=True)
class SymmetricCost:
    """Dense n x n real symmetric or complex Hermitian cost matrix."""

    entries: np.ndarray
    is_complex: bool = False

    def __post_init__(self):
        M = np.asarray(self.entries)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {M.shape}")
        if not np.isfinite(M).all():
            raise ValueError("cost matrix has non-finite entries")
        if not np.array_equal(M, M.conj().T):
            raise ValueError("cost matrix must be exactly Hermitian; use from_array")
        object.__setattr__(self, "entries", _locked(M))

    @classmethod
    def from_array(cls, M, warn_tol: float = SYMMETRY_WARN_TOL) -> "SymmetricCost":
        """Build from any square array, symmetrizing as (M + M^H)/2.

        Warns when the asymmetry exceeds ``warn_tol`` relative to the matrix
        scale (file round-trips legitimately introduce rounding below that).
        """
        M = np.asarray(M)
        is_complex = np.iscomplexobj(M)
        M = M.astype(np.complex128 if is_complex else np.float64)
        asym = np.abs(M - M.conj().T).max()
        scale = max(np.abs(M).max(), 1.0) if M.size else 1.0
        if asym > warn_tol * scale:
            warnings.warn(
                f"input asymmetry {asym:.3e} exceeds {warn_tol:.0e} of matrix scale; "
                "symmetrizing",
                stacklevel=2,
            )
        H = (M + M.conj().T) / 2
        if is_complex:
            # Hermitian diagonal is real by definition.
            np.fill_diagonal(H, H.diagonal().real)
        return cls(entries=H, is_complex=is_complex)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SignVector:
    """Length-n vector of unit-modulus entries: {+1,-1} or complex phases."""

    signs: np.ndarray
    is_complex: bool = False

    def __post_init__(self):
        s = np.asarray(self.signs)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("sign vector must be a nonempty 1-d array")
        s = s.astype(np.complex128 if self.is_complex else np.float64)
        if not np.allclose(np.abs(s), 1.0, rtol=0, atol=1e-12):
            raise ValueError("all sign entries must have unit modulus")
        if not self.is_complex and not np.array_equal(np.abs(s), np.ones(s.size)):
            raise ValueError("real sign entries must be exactly +1 or -1")
        object.__setattr__(self, "signs", _locked(s))

    @classmethod
    def ones(cls, n: int) -> "SignVector":
        return cls(signs=np.ones(n))

    @property
    def n(self) -> int:
        return self.signs.shape[0]


ROW_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SphereConfig:
    """n x r configuration with unit-norm rows (one point per sphere)."""

    rows: np.ndarray

    def __post_init__(self):
        Y = np.asarray(self.rows)
        if Y.ndim != 2 or Y.shape[0] == 0 or Y.shape[1] == 0:
            raise ValueError(f"configuration must be a nonempty 2-d array, got {Y.shape}")
        Y = Y.astype(np.complex128 if np.iscomplexobj(Y) else np.float64)
        norms = np.linalg.norm(Y, axis=1)
        if not np.allclose(norms, 1.0, rtol=0, atol=ROW_NORM_TOL):
            worst = np.abs(norms - 1.0).max()
            raise ValueError(f"rows must have unit norm (worst deviation {worst:.3e})")
        object.__setattr__(self, "rows", _locked(Y))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def r(self) -> int:
        return self.rows.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.rows)


@dataclass(frozen=True)
class PhaseVector:
    """Oscillator phases (interpreted mod 2 pi) with a global coupling K.

    K only rescales time in the dynamics; it defaults to 1.
    """

    angles: np.ndarray
    coupling_constant: float = 1.0

    def __post_init__(self):
        th = np.asarray(self.angles, dtype=np.float64)
        if th.ndim != 1 or th.size == 0:
            raise ValueError("angles must be a nonempty 1-d array")
        if not np.isfinite(th).all():
            raise ValueError("angles must be finite")
        if not self.coupling_constant > 0:
            raise ValueError("coupling constant must be positive")
        object.__setattr__(self, "angles", _locked(th))

    @property
    def n(self) -> int:
        return self.angles.shape[0]


@dataclass(frozen=True)
class Laplacian:
    """Dense symmetric/Hermitian Laplacian, optionally preconditioned.

    ``preconditioner`` is the positive diagonal D (as a vector) under which
    the stored entries equal D^{-1/2} L D^{-1/2}, or None for identity.
    """

    entries: np.ndarray
    preconditioner: np.ndarray | None = None

    def __post_init__(self):
        M = np.asarray(self.entries)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("Laplacian must be square")
        if not np.array_equal(M, M.conj().T):
            raise ValueError("Laplacian must be exactly Hermitian")
        object.__setattr__(self, "entries", _locked(M))
        if self.preconditioner is not None:
            d = np.asarray(self.preconditioner, dtype=np.float64)
            if d.shape != (M.shape[0],) or not (d > 0).all():
                raise ValueError("preconditioner must be a positive length-n vector")
            object.__setattr__(self, "preconditioner", _locked(d))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.entries)


def _check_match(C: SymmetricCost, other_n: int, what: str):
    if C.n != other_n:
        raise ValueError(f"dimension mismatch: cost is {C.n}x{C.n}, {what} has n={other_n}")


def _hermitize(M: np.ndarray) -> np.ndarray:
    """Remove round-off asymmetry so downstream type checks stay exact."""
    H = (M + M.conj().T) / 2
    if np.iscomplexobj(H):
        np.fill_diagonal(H, H.diagonal().real)
    return H


def objective(C: SymmetricCost, Y: SphereConfig) -> float:
    """The synchronization objective <C, Y Y^T> (real part when Hermitian)."""
    _check_match(C, Y.n, "configuration")
    if C.is_complex != Y.is_complex:
        raise ValueError("cost matrix and configuration must both be real or both complex")
    G = Y.rows @ Y.rows.conj().T
    return float(np.real(np.sum(C.entries.conj() * G)))


def gram_diagonal(C: SymmetricCost, Y: np.ndarray) -> np.ndarray:
    """diag(C Y Y^H) as a real vector (the row-wise certificate diagonal)."""
    d = np.sum((C.entries @ Y) * Y.conj(), axis=1)
    return d.real.copy()


def certificate_matrix(C: SymmetricCost, Y: SphereConfig) -> Laplacian:
    """S(Y) = ddiag(C Y Y^T) - C; at Y Y^T = z z^T this equals L(z).

    S(Y) Y = 0 is the first-order criticality condition, and S(Y) plays the
    role of the dual certificate at candidate optima.
    """
    _check_match(C, Y.n, "configuration")
    d = gram_diagonal(C, Y.rows)
    S = np.diag(d).astype(C.entries.dtype) - C.entries
    return Laplacian(entries=_hermitize(S))


def laplacian(C: SymmetricCost, z: SignVector) -> Laplacian:
    """The certificate Laplacian L(z) = ddiag(C z z^T) - C.

    By construction L(z) z = 0 in the real case (and in the complex case
    whenever diag(C z z^*) is real).
    """
    _check_match(C, z.n, "sign vector")
    Cz = C.entries @ z.signs
    d = np.real(Cz * z.signs.conj())
    L = np.diag(d).astype(C.entries.dtype) - C.entries
    return Laplacian(entries=_hermitize(L))


def degree_vector(C: SymmetricCost, z: SignVector) -> np.ndarray:
    """diag(C z z^T), the natural diagonal preconditioner for L(z)."""
    _check_match(C, z.n, "sign vector")
    return np.real((C.entries @ z.signs) * z.signs.conj()).copy()


def precondition(L: Laplacian, D: np.ndarray) -> Laplacian:
    """D^{-1/2} L D^{-1/2} for a strictly positive diagonal D (as a vector)."""
    D = np.asarray(D, dtype=np.float64)
    if D.shape != (L.n,):
        raise ValueError(f"dimension mismatch: preconditioner has shape {D.shape}, n={L.n}")
    if not (D > 0).all():
        raise ValueError("preconditioner not positive")
    if L.preconditioner is not None:
        raise ValueError("Laplacian is already preconditioned")
    s = 1.0 / np.sqrt(D)
    M = s[:, None] * L.entries * s[None, :]
    return Laplacian(entries=_hermitize(M), preconditioner=D)


def tangent_project(Y: SphereConfig, V: np.ndarray) -> np.ndarray:
    """Project V onto the tangent space at Y, row by row.

    Row i of the output is V_i - Re<V_i, Y_i> Y_i (the Re is a no-op in the
    real case).  The map is idempotent and self-adjoint.
    """
    V = np.asarray(V)
    if V.shape != Y.rows.shape:
        raise ValueError(f"dimension mismatch: V has shape {V.shape}, Y is {Y.rows.shape}")
    coef = np.sum(V * Y.rows.conj(), axis=1).real
    return V - coef[:, None] * Y.rows


def retract(Y: SphereConfig, V: np.ndarray) -> SphereConfig:
    """Metric-projection retraction: normalize each row of Y + V."""
    V = np.asarray(V)
    if V.shape != Y.rows.shape:
        raise ValueError(f"dimension mismatch: V has shape {V.shape}, Y is {Y.rows.shape}")
    stepped = Y.rows + V
    norms = np.linalg.norm(stepped, axis=1)
    if not (norms > 1e-300).all():
        raise RetractionSingularity("retraction singularity: a row of Y + V vanished")
    return SphereConfig(rows=stepped / norms[:, None])


class Alignment(NamedTuple):
    rho: float
    direction: np.ndarray
    degenerate: bool


def alignment(Y: SphereConfig, z: SignVector, D: np.ndarray | None = None) -> Alignment:
    """D-weighted correlation of Y with the rank-one configuration z v^T.

    After twisting by z (Y' = diag(z)^H Y), decompose Y' = rho 1 v^T + W
    with W^H D 1 = 0; returns rho in [0, 1] and the unit vector v.  rho = 1
    exactly when Y Y^H = z z^H.  A zero rho is flagged degenerate and v is
    reported as the first coordinate vector.
    """
    _d = np.ones(Y.n) if D is None else np.asarray(D, dtype=np.float64)
    if _d.shape != (Y.n,) or not (_d > 0).all():
        raise ValueError("weight vector must be positive with length n")
    if z.n != Y.n:
        raise ValueError("dimension mismatch between configuration and sign vector")
    Yp = z.signs.conj()[:, None] * Y.rows
    trace_d = _d.sum()
    v_raw = Yp.conj().T @ _d
    rho = float(np.linalg.norm(v_raw) / trace_d)
    if rho < 1e-14:
        v = np.zeros(Y.r, dtype=Y.rows.dtype)
        v[0] = 1.0
        return Alignment(rho=0.0, direction=v, degenerate=True)
    return Alignment(rho=rho, direction=v_raw / np.linalg.norm(v_raw), degenerate=False)


def recovery_check(Y: SphereConfig, z: SignVector, tol: float) -> bool:
    """True iff max_ij |(Y Y^H)_ij - z_i conj(z_j)| <= tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if z.n != Y.n:
        raise ValueError("dimension mismatch between configuration and sign vector")
    G = Y.rows @ Y.rows.conj().T
    target = np.outer(z.signs, z.signs.conj())
    return bool(np.abs(G - target).max() <= tol)


def angles_to_config(theta) -> SphereConfig:
    """Embed phases on the unit circle: row i is (cos theta_i, sin theta_i)."""
    th = theta.angles if isinstance(theta, PhaseVector) else np.asarray(theta, dtype=float)
    return SphereConfig(rows=np.column_stack([np.cos(th), np.sin(th)]))


def config_to_angles(Y: SphereConfig, coupling_constant: float = 1.0) -> PhaseVector:
    """Angles of an r = 2 real configuration (inverse of angles_to_config)."""
    if Y.is_complex or Y.r != 2:
        raise ValueError("angle form requires a real configuration with r = 2")
    return PhaseVector(
        angles=np.arctan2(Y.rows[:, 1], Y.rows[:, 0]),
        coupling_constant=coupling_constant,
    )
