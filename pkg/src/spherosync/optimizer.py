"""Riemannian gradient ascent on the product of spheres.

Maximizes <C, Y Y^T> subject to unit-norm rows, by projected-gradient steps
with a metric-projection retraction and backtracking line search, followed
by a second-order criticality probe: the smallest curvature of the form
V -> <S(Y), V V^T> over the tangent space, computed exactly (dense tangent
Hessian) when the tangent dimension is small and by shifted power iteration
otherwise.  Negative curvature triggers a bounded number of escape steps.

The objective never decreases across accepted steps, and row norms stay on
the spheres to retraction accuracy (~1e-16 per step).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    RetractionSingularity,
    SignVector,
    SphereConfig,
    SymmetricCost,
    alignment,
    certificate_matrix,
    gram_diagonal,
    objective,
    operator_norm,
    recovery_check,
    retract,
    tangent_project,
)
from .rng import generator, splitmix64

# Below n (r - 1) tangent dimensions of this size, the curvature probe
# builds the exact dense tangent Hessian instead of iterating.
DENSE_HESSIAN_LIMIT = 600

RECOVERY_TOL = 1e-6


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for ascend/solve.

    step_rule "backtracking" starts each iteration at 1/(2 ||C||) (or at
    ``step`` if set) and shrinks until the sufficient-increase test passes;
    "fixed" always takes ``step``.  grad_tol and curvature_tol are relative
    to ||C||.
    """

    max_iters: int = 5000
    grad_tol: float = 1e-8
    step_rule: str = "backtracking"
    step: float | None = None
    shrink: float = 0.5
    sufficient_increase: float = 1e-4
    hessian_probe_iters: int = 200
    escape_attempts: int = 5
    escape_radius: float = 1e-3
    curvature_tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.step_rule not in ("backtracking", "fixed"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.step_rule == "fixed" and (self.step is None or self.step <= 0):
            raise ValueError("fixed step rule requires a positive step")
        if not (0 < self.shrink < 1):
            raise ValueError("shrink must lie in (0, 1)")
        if min(self.grad_tol, self.sufficient_increase, self.escape_radius, self.curvature_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 0 or self.hessian_probe_iters < 1 or self.escape_attempts < 0:
            raise ValueError("iteration budgets must be nonnegative (probe iters >= 1)")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one ascent/solve run."""

    final_Y: SphereConfig
    objective: float
    grad_norm: float
    min_hessian_curvature: float
    rho: float
    second_order_critical: bool
    recovered: bool | None
    iterations: int
    escapes_used: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective,
            "grad_norm": self.grad_norm,
            "min_hessian_curvature": self.min_hessian_curvature,
            "rho": self.rho,
            "second_order_critical": self.second_order_critical,
            "recovered": self.recovered,
            "iterations": self.iterations,
            "escapes_used": self.escapes_used,
            "converged": self.converged,
        }


def random_init(n: int, r: int, seed: int, is_complex: bool = False) -> SphereConfig:
    """Rows drawn i.i.d. uniform on the sphere (normalized Gaussians)."""
    if r < 1:
        raise ValueError("need r >= 1")
    rng = generator(seed)
    Y = rng.standard_normal((n, r))
    if is_complex:
        Y = Y + 1j * rng.standard_normal((n, r))
    norms = np.linalg.norm(Y, axis=1)
    while (norms == 0).any():  # probability zero, but stay total
        bad = norms == 0
        Y[bad] = rng.standard_normal((int(bad.sum()), r))
        norms = np.linalg.norm(Y, axis=1)
    return SphereConfig(rows=Y / norms[:, None])


def riemannian_gradient(C: SymmetricCost, Y: SphereConfig) -> np.ndarray:
    """Ascent gradient 2 (C Y - ddiag(C Y Y^T) Y) = -2 S(Y) Y; tangent at Y."""
    CY = C.entries @ Y.rows
    d = np.sum(CY * Y.rows.conj(), axis=1).real
    return 2.0 * (CY - d[:, None] * Y.rows)


def hessian_quadratic_form(C: SymmetricCost, Y: SphereConfig, V: np.ndarray) -> float:
    """Second-order form <S(Y), V V^T> (V projected to the tangent space).

    At a first-order critical Y, nonnegativity over all tangent V is
    exactly second-order criticality; the second derivative of the
    objective along retract(Y, tV) is -2 <S(Y), V V^T>.
    """
    V = tangent_project(Y, V)
    S = certificate_matrix(C, Y).entries
    return float(np.real(np.sum((S @ V) * V.conj())))


def _frob(V: np.ndarray) -> float:
    return float(np.linalg.norm(V))


def ascend(C: SymmetricCost, Y0: SphereConfig, opts: SolveOptions, callback=None) -> SolveReport:
    """Gradient ascent until stationarity (relative grad_tol) or max_iters.

    With backtracking, every accepted step increases the objective, so the
    accepted-objective sequence is non-decreasing by construction.  A run
    that exhausts max_iters (or stalls with a vanishing step) reports
    converged = False.  ``callback(iteration, objective)`` fires after every
    accepted step.
    """
    if C.n != Y0.n:
        raise ValueError("dimension mismatch between cost and initial configuration")
    norm_C = operator_norm(C.entries)
    grad_floor = opts.grad_tol * max(norm_C, 1e-300)
    base_step = opts.step if opts.step is not None else (
        0.5 / norm_C if norm_C > 0 else 1.0
    )

    Y = Y0
    obj = objective(C, Y)
    iterations = 0
    converged = False
    grad_norm = _frob(riemannian_gradient(C, Y))
    # Warm-started line search: begin each iteration slightly above the
    # previously accepted step, capped at the base step.
    t_start = base_step

    while iterations < opts.max_iters:
        G = riemannian_gradient(C, Y)
        grad_norm = _frob(G)
        if grad_norm <= grad_floor:
            converged = True
            break
        if opts.step_rule == "fixed":
            try:
                Y_new = retract(Y, base_step * G)
            except RetractionSingularity:
                break
            obj_new = objective(C, Y_new)
            if obj_new < obj:
                break  # fixed step overshot; keep the last monotone iterate
            Y, obj = Y_new, obj_new
        else:
            t = t_start
            accepted = False
            while t > 1e-20 * base_step:
                try:
                    Y_new = retract(Y, t * G)
                except RetractionSingularity:
                    t *= opts.shrink
                    continue
                obj_new = objective(C, Y_new)
                if obj_new >= obj + opts.sufficient_increase * t * grad_norm**2:
                    Y, obj = Y_new, obj_new
                    accepted = True
                    break
                t *= opts.shrink
            if not accepted or t < 1e-16 * base_step:
                break  # no numerically meaningful ascent step remains
            t_start = min(base_step, t / opts.shrink)
        iterations += 1
        if callback is not None:
            callback(iterations, obj)

    if not converged:
        grad_norm = _frob(riemannian_gradient(C, Y))
        converged = grad_norm <= grad_floor

    rho = alignment(Y, SignVector.ones(Y.n) if not Y.is_complex else
                    SignVector(signs=np.ones(Y.n, dtype=complex), is_complex=True)).rho
    return SolveReport(
        final_Y=Y,
        objective=obj,
        grad_norm=grad_norm,
        min_hessian_curvature=float("nan"),
        rho=rho,
        second_order_critical=False,
        recovered=None,
        iterations=iterations,
        escapes_used=0,
        converged=converged,
    )


def _tangent_bases(Y: SphereConfig) -> np.ndarray:
    """Per-row orthonormal bases of the tangent complement, (n, r-1, r)."""
    n, r = Y.n, Y.r
    if r == 2:
        B = np.empty((n, 1, 2))
        B[:, 0, 0] = -Y.rows[:, 1]
        B[:, 0, 1] = Y.rows[:, 0]
        return B
    B = np.empty((n, r - 1, r))
    for i in range(n):
        Q, _ = np.linalg.qr(Y.rows[i].reshape(r, 1), mode="complete")
        B[i] = Q[:, 1:].T
    return B


def _dense_min_curvature(C, Y):
    """Exact smallest curvature via the dense tangent-space Hessian."""
    S = certificate_matrix(C, Y).entries
    B = _tangent_bases(Y)
    n, rm1 = B.shape[0], B.shape[1]
    G = np.einsum("iak,jbk->iajb", B, B)
    H = (S[:, None, :, None] * G).reshape(n * rm1, n * rm1)
    H = (H + H.T) / 2
    evs, vecs = np.linalg.eigh(H)
    x = vecs[:, 0].reshape(n, rm1)
    V = np.einsum("ia,iak->ik", x, B)
    return float(evs[0]), V


def min_curvature_direction(C: SymmetricCost, Y: SphereConfig, iters: int, seed: int):
    """Smallest curvature of the second-order form over the tangent space.

    Returns (curvature, V) with V a unit-Frobenius tangent direction.
    Small real problems get the exact dense answer; otherwise power
    iteration on the shifted operator V -> P_T((2||C|| I - S(Y)) V).
    """
    if iters < 1:
        raise ValueError("need iters >= 1")
    if not Y.is_complex and Y.n * (Y.r - 1) <= DENSE_HESSIAN_LIMIT and Y.r >= 2:
        curv, V = _dense_min_curvature(C, Y)
        nv = _frob(V)
        return curv, V / nv if nv > 0 else V

    S = certificate_matrix(C, Y).entries
    shift = 2.0 * operator_norm(C.entries)
    rng = generator(seed)
    V = rng.standard_normal(Y.rows.shape)
    if Y.is_complex:
        V = V + 1j * rng.standard_normal(Y.rows.shape)
    V = tangent_project(Y, V)
    nv = _frob(V)
    if nv == 0:
        return 0.0, V
    V /= nv
    for _ in range(iters):
        V = tangent_project(Y, shift * V - S @ V)
        nv = _frob(V)
        if nv <= 1e-300:
            break
        V /= nv
    curv = float(np.real(np.sum((S @ V) * V.conj())))
    return curv, V


def solve(
    C: SymmetricCost,
    r: int,
    opts: SolveOptions,
    z: SignVector | None = None,
    Y0: SphereConfig | None = None,
) -> SolveReport:
    """Ascend, verify second-order criticality, escape saddles, repeat.

    After each converged ascent the smallest tangent curvature is probed;
    if it is below -curvature_tol ||C||, the iterate is nudged a distance
    escape_radius along the negative-curvature direction (or, failing
    improvement, a fresh random tangent direction) and ascent resumes, up
    to escape_attempts times.  With r = 1 the spheres are discrete points,
    so only criticality of the initial configuration is evaluated.
    """
    if r < 1:
        raise ValueError("need r >= 1")
    if z is not None and z.n != C.n:
        raise ValueError("dimension mismatch between cost and ground truth")
    norm_C = operator_norm(C.entries)
    if Y0 is None:
        Y0 = random_init(C.n, r, splitmix64(opts.seed), is_complex=C.is_complex)
    elif Y0.r != r:
        raise ValueError(f"initial configuration has r={Y0.r}, expected {r}")

    if r == 1:
        # The tangent space is trivial at r = 1 (discrete spheres), so the
        # smooth criticality conditions hold vacuously at any configuration.
        grad_norm = _frob(riemannian_gradient(C, Y0))
        return SolveReport(
            final_Y=Y0,
            objective=objective(C, Y0),
            grad_norm=grad_norm,
            min_hessian_curvature=0.0,
            rho=alignment(Y0, z if z is not None else SignVector.ones(C.n)).rho,
            second_order_critical=grad_norm <= opts.grad_tol * max(norm_C, 1e-300),
            recovered=recovery_check(Y0, z, RECOVERY_TOL) if z is not None else None,
            iterations=0,
            escapes_used=0,
            converged=True,
        )

    curv_floor = -opts.curvature_tol * max(norm_C, 1e-300)
    total_iters = 0
    escapes = 0
    report = ascend(C, Y0, opts)
    total_iters += report.iterations
    curv, V = min_curvature_direction(
        C, report.final_Y, opts.hessian_probe_iters, splitmix64(opts.seed ^ 2)
    )

    attempt = 0
    while report.converged and curv < curv_floor and attempt < opts.escape_attempts:
        attempt += 1
        escaped = None
        for probe_idx, direction in enumerate((V, None)):
            if direction is None:
                rng = generator(splitmix64(opts.seed ^ (16 + attempt)))
                direction = tangent_project(report.final_Y, rng.standard_normal(report.final_Y.rows.shape))
                nd = _frob(direction)
                if nd == 0:
                    continue
                direction = direction / nd
            for sign in (1.0, -1.0):
                Y_try = retract(report.final_Y, sign * opts.escape_radius * direction)
                probe = ascend(C, Y_try, replace(opts, max_iters=100))
                total_iters += probe.iterations
                if probe.objective > report.objective + 1e-12 * max(1.0, abs(report.objective)):
                    escaped = probe.final_Y
                    break
            if escaped is not None:
                break
        if escaped is None:
            break
        escapes += 1
        report = ascend(C, escaped, opts)
        total_iters += report.iterations
        curv, V = min_curvature_direction(
            C, report.final_Y, opts.hessian_probe_iters, splitmix64(opts.seed ^ (32 + attempt))
        )

    second_order = bool(report.converged and curv >= curv_floor)
    recovered = recovery_check(report.final_Y, z, RECOVERY_TOL) if z is not None else None
    rho = alignment(report.final_Y, z).rho if z is not None else report.rho
    return SolveReport(
        final_Y=report.final_Y,
        objective=report.objective,
        grad_norm=report.grad_norm,
        min_hessian_curvature=curv,
        rho=rho,
        second_order_critical=second_order,
        recovered=recovered,
        iterations=total_iters,
        escapes_used=escapes,
        converged=report.converged,
    )
