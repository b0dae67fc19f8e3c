"""Homogeneous Kuramoto dynamics and equilibrium classification.

The phase dynamics d theta_i / dt = K sum_j A_ij sin(theta_j - theta_i)
are the Riemannian gradient flow of the potential <A, Y Y^T> on the torus
(Y the r = 2 angle embedding), so the potential is non-decreasing along
trajectories.  K only rescales time and defaults to 1.

An equilibrium theta is classified through the Laplacian of the modulated
coupling At_ij = A_ij cos(theta_i - theta_j): the linearization of the flow
is -Lt with Lt = ddiag(At 1 1^T) - At, whose kernel always contains the
global phase shift 1.  lambda_2(Lt), the smallest eigenvalue off the shift
direction, decides stability: positive at a non-synchronized equilibrium
means a stable spurious state.  Signed (repulsive) couplings are fully
supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhaseVector, SymmetricCost, operator_norm

CLASS_SYNCHRONIZED = "synchronized"
CLASS_STABLE_NONSYNC = "stable_nonsync"
CLASS_SADDLE_OR_UNSTABLE = "saddle_or_unstable"
CLASS_NOT_CONVERGED = "not_converged"

_EIG_ZERO_TOL = 1e-9
_SHIFT_CORRELATION = 0.99
_CHECK_STRIDE = 16


@dataclass(frozen=True)
class SimOptions:
    """Integration controls.

    time_step and stall_tol default to 0.05 / ||A|| and 1e-9 ||A|| when left
    as None.  stop_on_sync ends a run as soon as the state enters the
    synchronized set (all pairwise phase spreads within sync_tol), which is
    invariant under the flow; leave it False to always integrate to an
    equilibrium or to max_time.
    """

    time_step: float | None = None
    max_time: float = 100.0
    integrator: str = "rk4"
    sync_tol: float = 1e-6
    stall_tol: float | None = None
    seed: int = 0
    stop_on_sync: bool = False

    def __post_init__(self):
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.time_step is not None and not (0 < self.time_step < self.max_time):
            raise ValueError("need 0 < time_step < max_time")
        if self.max_time <= 0 or self.sync_tol <= 0:
            raise ValueError("max_time and sync_tol must be positive")
        if self.stall_tol is not None and self.stall_tol <= 0:
            raise ValueError("stall_tol must be positive")


@dataclass(frozen=True)
class EquilibriumReport:
    final_angles: PhaseVector
    velocity_norm: float
    synchronized: bool
    hessian_min_eig: float
    classification: str

    def __post_init__(self):
        if self.synchronized and self.classification != CLASS_SYNCHRONIZED:
            raise ValueError("a synchronized state must be classified as synchronized")

    def to_json_dict(self) -> dict:
        return {
            "velocity_norm": self.velocity_norm,
            "synchronized": self.synchronized,
            "hessian_min_eig": self.hessian_min_eig,
            "classification": self.classification,
        }


def phase_velocity(A: SymmetricCost, theta: np.ndarray, coupling: float = 1.0) -> np.ndarray:
    """d theta / dt = K (cos theta * (A sin theta) - sin theta * (A cos theta))."""
    c, s = np.cos(theta), np.sin(theta)
    return coupling * (c * (A.entries @ s) - s * (A.entries @ c))


def potential(A: SymmetricCost, theta: np.ndarray) -> float:
    """The flow's Lyapunov function sum_ij A_ij cos(theta_i - theta_j)."""
    c, s = np.cos(theta), np.sin(theta)
    return float(c @ (A.entries @ c) + s @ (A.entries @ s))


def max_phase_spread(theta: np.ndarray) -> float:
    """Smallest arc containing all phases mod 2 pi (pi means >= half circle)."""
    wrapped = np.sort(np.mod(theta, 2 * np.pi))
    gaps = np.diff(wrapped, append=wrapped[0] + 2 * np.pi)
    return min(float(2 * np.pi - gaps.max()), np.pi)


def is_synchronized(theta: np.ndarray, sync_tol: float) -> bool:
    """True iff min_ij cos(theta_i - theta_j) >= 1 - sync_tol."""
    return bool(np.cos(max_phase_spread(theta)) >= 1 - sync_tol)


def twisted_state(n: int, q: int) -> PhaseVector:
    """Winding-q twisted state theta_i = 2 pi q i / n (an equilibrium of any
    circulant coupling, by symmetry)."""
    return PhaseVector(angles=2 * np.pi * q * np.arange(n) / n)


def modulated_laplacian(A: SymmetricCost, theta: np.ndarray) -> np.ndarray:
    """Laplacian of At_ij = A_ij cos(theta_i - theta_j), the (negated)
    linearization of the flow at theta.  At a synchronized state this is
    exactly the Laplacian of A."""
    c, s = np.cos(np.asarray(theta)), np.sin(np.asarray(theta))
    At = A.entries * (np.outer(c, c) + np.outer(s, s))
    Lt = np.diag(At.sum(axis=1)) - At
    return (Lt + Lt.T) / 2


def _linearization_gap(A: SymmetricCost, theta: np.ndarray):
    """lambda_2 of the modulated Laplacian, excluding the global-shift mode.

    The shift mode is identified as the eigenvalue of smallest magnitude
    whose eigenvector correlates > 0.99 with the normalized all-ones vector
    (falling back to the smallest-magnitude eigenvalue at degenerate
    states).
    """
    n = A.n
    evs, vecs = np.linalg.eigh(modulated_laplacian(A, theta))
    corr = np.abs(vecs.T @ np.full(n, 1 / np.sqrt(n)))
    candidates = np.flatnonzero(corr > _SHIFT_CORRELATION)
    if candidates.size:
        shift_idx = candidates[np.abs(evs[candidates]).argmin()]
    else:
        shift_idx = int(np.abs(evs).argmin())
    rest = np.delete(evs, shift_idx)
    return float(rest.min()), float(np.abs(evs).max())


def classify_equilibrium(A: SymmetricCost, theta, tol: float | None = None) -> EquilibriumReport:
    """Classify an approximate equilibrium via its linearization spectrum.

    States with velocity above tol (default 1e-6 ||A||) are not_converged.
    Otherwise: synchronized when all pairwise phase differences vanish
    within the default sync tolerance; stable_nonsync when lambda_2 of the
    modulated Laplacian is positive; saddle_or_unstable when it is not.
    """
    pv = theta if isinstance(theta, PhaseVector) else PhaseVector(angles=np.asarray(theta, float))
    norm_A = operator_norm(A.entries)
    if tol is None:
        tol = 1e-6 * max(1.0, norm_A)
    vel = float(np.linalg.norm(phase_velocity(A, pv.angles, pv.coupling_constant)))
    synced = is_synchronized(pv.angles, SimOptions().sync_tol)
    gap, scale = _linearization_gap(A, pv.angles)
    if vel > tol:
        return EquilibriumReport(pv, vel, False, gap, CLASS_NOT_CONVERGED)
    if synced:
        classification = CLASS_SYNCHRONIZED
    elif gap > _EIG_ZERO_TOL * max(1.0, scale):
        classification = CLASS_STABLE_NONSYNC
    else:
        classification = CLASS_SADDLE_OR_UNSTABLE
    return EquilibriumReport(pv, vel, synced, gap, classification)


def simulate(
    A: SymmetricCost,
    theta0: PhaseVector,
    opts: SimOptions = SimOptions(),
    trajectory=None,
    stride: int = 10,
) -> EquilibriumReport:
    """Integrate the phase dynamics until equilibrium or max_time.

    Stops when the phase-velocity norm falls below stall_tol and then
    classifies the endpoint; with stop_on_sync, entering the synchronized
    set also ends the run.  ``trajectory`` optionally receives a CSV of
    t, theta_1 ... theta_n rows every ``stride`` steps.
    """
    if A.is_complex:
        raise ValueError("oscillator coupling must be real")
    if A.n != theta0.n:
        raise ValueError("dimension mismatch between coupling matrix and phases")
    norm_A = operator_norm(A.entries)
    dt = opts.time_step if opts.time_step is not None else 0.05 / max(norm_A, 1e-300)
    stall = opts.stall_tol if opts.stall_tol is not None else 1e-9 * max(norm_A, 1e-300)
    K = theta0.coupling_constant

    theta = theta0.angles.copy()
    steps = max(1, int(np.ceil(opts.max_time / dt)))
    writer = None
    if trajectory is not None:
        writer = open(trajectory, "w", encoding="utf-8")
        writer.write("t," + ",".join(f"theta_{i + 1}" for i in range(A.n)) + "\n")

    def dump(t, th):
        writer.write(f"{float(t)!r}," + ",".join(repr(float(v)) for v in th) + "\n")

    vel = phase_velocity(A, theta, K)
    vnorm = float(np.linalg.norm(vel))
    try:
        if writer:
            dump(0.0, theta)
        for step in range(1, steps + 1):
            if vnorm <= stall:
                break
            if opts.stop_on_sync and step % _CHECK_STRIDE == 0 and is_synchronized(theta, opts.sync_tol):
                break
            if opts.integrator == "euler":
                theta = theta + dt * vel
            else:
                k1 = vel
                k2 = phase_velocity(A, theta + 0.5 * dt * k1, K)
                k3 = phase_velocity(A, theta + 0.5 * dt * k2, K)
                k4 = phase_velocity(A, theta + dt * k3, K)
                theta = theta + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.isfinite(theta).all():
                raise FloatingPointError("oscillator state became non-finite")
            vel = phase_velocity(A, theta, K)
            vnorm = float(np.linalg.norm(vel))
            if writer and step % max(1, stride) == 0:
                dump(step * dt, theta)
    finally:
        if writer:
            writer.close()

    final = PhaseVector(angles=theta, coupling_constant=K)
    synced = is_synchronized(theta, opts.sync_tol)
    gap, scale = _linearization_gap(A, theta)
    if vnorm <= stall:
        if synced:
            classification = CLASS_SYNCHRONIZED
        elif gap > _EIG_ZERO_TOL * max(1.0, scale):
            classification = CLASS_STABLE_NONSYNC
        else:
            classification = CLASS_SADDLE_OR_UNSTABLE
    elif synced:
        classification = CLASS_SYNCHRONIZED
    else:
        classification = CLASS_NOT_CONVERGED
    return EquilibriumReport(final, vnorm, synced, gap, classification)
