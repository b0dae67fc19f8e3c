"""Instance generators for the synchronization model families.

All generators are deterministic given (parameters, seed), draw through the
package RNG (Philox keyed by the seed, see rng.py), emit exactly symmetric
matrices with zero diagonal, and return SymmetricCost values.  Centering of
a stochastic-block-model adjacency is the one operation that produces a
nonzero (constant) diagonal, since the centering constant is subtracted
from every entry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import SignVector, SymmetricCost
from .rng import generator

FAMILIES = (
    "gaussian_z2",
    "censored_block",
    "sbm",
    "signed_er",
    "circulant_knn",
    "random_regular",
    "file",
)

_REGULAR_ATTEMPTS = 1000


def _as_signs(z) -> SignVector:
    return z if isinstance(z, SignVector) else SignVector(signs=np.asarray(z, dtype=float))


def _symmetric_uniform(n: int, rng) -> np.ndarray:
    """One upper-triangular uniform draw per unordered pair, mirrored."""
    U = rng.random((n, n))
    return np.triu(U, 1) + np.triu(U, 1).T


def gaussian_z2(n: int, sigma: float, z, seed: int) -> SymmetricCost:
    """Rank-one signal plus Gaussian noise: C_ij = z_i z_j + sigma xi_ij.

    The noise is i.i.d. standard normal per unordered pair; the diagonal is
    zero (it does not affect the ground-truth optimum).
    """
    if sigma < 0:
        raise ValueError("noise level must be nonnegative")
    z = _as_signs(z)
    rng = generator(seed)
    Xi = np.triu(rng.standard_normal((n, n)), 1)
    C = np.outer(z.signs, z.signs) + sigma * (Xi + Xi.T)
    np.fill_diagonal(C, 0.0)
    return SymmetricCost(entries=C)


def censored_block(n: int, p: float, delta: float, z, seed: int) -> SymmetricCost:
    """Erdos-Renyi measurements of z_i z_j with random sign flips.

    Each pair is observed with probability p; an observation carries the
    true sign with probability (1+delta)/2 and the flipped sign otherwise,
    so C_ij is +z_i z_j w.p. (1+delta)p/2, -z_i z_j w.p. (1-delta)p/2, and
    0 w.p. 1-p.
    """
    if not (0 <= p <= 1 and 0 <= delta <= 1):
        raise ValueError("p and delta must lie in [0, 1]")
    z = _as_signs(z)
    rng = generator(seed)
    U = _symmetric_uniform(n, rng)
    sign = np.where(U < p * (1 + delta) / 2, 1.0, -1.0)
    edge = (U < p) & ~np.eye(n, dtype=bool)
    C = np.where(edge, sign * np.outer(z.signs, z.signs), 0.0)
    np.fill_diagonal(C, 0.0)
    return SymmetricCost(entries=C)


def signed_er(n: int, p: float, delta: float, seed: int) -> SymmetricCost:
    """Random signed oscillator coupling: censored model with z = 1."""
    return censored_block(n, p, delta, SignVector.ones(n), seed)


def sbm(n: int, p: float, q: float, z, seed: int) -> SymmetricCost:
    """Binary symmetric stochastic block model adjacency (0/1, zero diagonal).

    Edges appear with probability p within blocks (z_i = z_j) and q across.
    """
    if not (0 <= q <= p <= 1):
        raise ValueError("need 0 <= q <= p <= 1")
    z = _as_signs(z)
    rng = generator(seed)
    U = _symmetric_uniform(n, rng)
    prob = np.where(np.outer(z.signs, z.signs) > 0, p, q)
    A = np.where((U < prob) & ~np.eye(n, dtype=bool), 1.0, 0.0)
    return SymmetricCost(entries=A)


def center(A: SymmetricCost, mode: str, p: float | None = None, q: float | None = None) -> SymmetricCost:
    """Subtract a constant from every entry of A (including the diagonal).

    mode "known" uses c = (p+q)/2 and requires both probabilities; mode
    "estimated" uses the empirical mean c = <A, 1 1^T> / n^2.
    """
    if mode == "known":
        if p is None or q is None:
            raise ValueError("known centering requires both p and q")
        c = (p + q) / 2
    elif mode == "estimated":
        c = float(A.entries.sum()) / A.n**2
    else:
        raise ValueError(f"unknown centering mode {mode!r}")
    return SymmetricCost(entries=A.entries - c)


def circulant_knn(n: int, k: int) -> SymmetricCost:
    """k-nearest-neighbor circulant adjacency: i ~ i +- 1, ..., i +- k mod n."""
    if k < 1 or n < 2 * k + 1:
        raise ValueError(f"need k >= 1 and n >= 2k+1, got n={n}, k={k}")
    A = np.zeros((n, n))
    idx = np.arange(n)
    for off in range(1, k + 1):
        A[idx, (idx + off) % n] = 1.0
        A[idx, (idx - off) % n] = 1.0
    return SymmetricCost(entries=A)


def random_regular(n: int, d: int, seed: int) -> SymmetricCost:
    """Simple d-regular graph via stub pairing with local repair.

    Stubs are matched uniformly; colliding stubs (self-loops or repeated
    edges) are re-shuffled and re-matched until none remain, restarting
    from scratch if a pass makes no progress.  Attempts are bounded.
    """
    if (n * d) % 2 != 0:
        raise ValueError("n * d must be even")
    if not 0 < d < n:
        raise ValueError("need 0 < d < n")
    rng = generator(seed)

    def one_attempt():
        edges = set()
        stubs = np.repeat(np.arange(n), d)
        while stubs.size:
            rng.shuffle(stubs)
            leftover = []
            for s1, s2 in zip(stubs[0::2], stubs[1::2]):
                a, b = (int(s1), int(s2)) if s1 < s2 else (int(s2), int(s1))
                if a == b or (a, b) in edges:
                    leftover.extend((a, b))
                else:
                    edges.add((a, b))
            if len(leftover) == stubs.size:
                return None  # no progress: dead end
            stubs = np.asarray(leftover, dtype=int)
        return edges

    for _ in range(_REGULAR_ATTEMPTS):
        edges = one_attempt()
        if edges is not None:
            A = np.zeros((n, n))
            for a, b in edges:
                A[a, b] = A[b, a] = 1.0
            return SymmetricCost(entries=A)
    raise RuntimeError(f"failed to build a simple {d}-regular graph in {_REGULAR_ATTEMPTS} attempts")


def gaussian_sigma_star(n: int) -> float:
    """Exact-recovery noise threshold sqrt(n / (2 log n)) for the Gaussian model."""
    if n < 3:
        raise ValueError("need n >= 3")
    return math.sqrt(n / (2 * math.log(n)))


def censored_margin(n: int, p: float, delta: float) -> float:
    """Left-hand side of the censored-model recovery condition,
    n p / log n * (1 - sqrt(1 - delta^2)); the threshold is at value 1."""
    if n < 3:
        raise ValueError("need n >= 3")
    if not (0 <= p <= 1 and 0 <= delta <= 1):
        raise ValueError("p and delta must lie in [0, 1]")
    return n * p / math.log(n) * (1 - math.sqrt(1 - delta**2))


def censored_delta_star(n: int, p: float) -> float:
    """Signal strength at which the censored margin equals 1 (or 1.0 when
    even delta = 1 stays below threshold)."""
    if n < 3:
        raise ValueError("need n >= 3")
    gap = math.log(n) / (n * p)
    if gap >= 1:
        return 1.0
    return math.sqrt(1 - (1 - gap) ** 2)


def sbm_margin(n: int, p: float, q: float, epsilon: float = 0.0) -> float:
    """Left-hand side of the block-model recovery condition,
    (n / log n) (sqrt((1-e)p + e q) - sqrt((1-e)q + e p))^2; threshold 2."""
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    lo = math.sqrt((1 - epsilon) * q + epsilon * p)
    hi = math.sqrt((1 - epsilon) * p + epsilon * q)
    return n / math.log(n) * (hi - lo) ** 2


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one problem-instance family.

    ground_truth is "all_ones", "balanced" (first half +1), "random"
    (Rademacher from the seed), or an explicit list of signs.
    """

    family: str
    n: int
    params: dict = field(default_factory=dict)
    seed: int = 0
    ground_truth: object = "all_ones"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 2:
            raise ValueError("need n >= 2")

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        raw = json.loads(text)
        try:
            return cls(
                family=raw["family"],
                n=int(raw["n"]),
                params=dict(raw.get("params", {})),
                seed=int(raw.get("seed", 0)),
                ground_truth=raw.get("ground_truth", "all_ones"),
            )
        except KeyError as exc:
            raise ValueError(f"model spec missing required field {exc}") from None

    def to_json(self) -> str:
        gt = self.ground_truth
        if isinstance(gt, np.ndarray):
            gt = [int(v) for v in gt]
        return json.dumps(
            {
                "family": self.family,
                "n": self.n,
                "params": self.params,
                "seed": self.seed,
                "ground_truth": gt,
            },
            sort_keys=True,
        )


def ground_truth_vector(spec: ModelSpec) -> SignVector:
    """Materialize the spec's ground truth as a sign vector.

    The "random" option draws from a seed derived by flipping the top bit,
    so it never collides with the noise draw of the generator itself.
    """
    gt = spec.ground_truth
    if isinstance(gt, str):
        if gt == "all_ones":
            return SignVector.ones(spec.n)
        if gt == "balanced":
            signs = np.ones(spec.n)
            signs[spec.n // 2 :] = -1.0
            return SignVector(signs=signs)
        if gt == "random":
            rng = generator(spec.seed ^ (1 << 63))
            return SignVector(signs=np.where(rng.random(spec.n) < 0.5, 1.0, -1.0))
        raise ValueError(f"unknown ground truth {gt!r}")
    return SignVector(signs=np.asarray(gt, dtype=float))


def generate(spec: ModelSpec):
    """Build (cost matrix, ground truth) for a model spec.

    The sbm family returns the centered cost matrix, with the centering
    mode taken from params ("known" or "estimated", default "known").
    """
    z = ground_truth_vector(spec)
    p = spec.params
    if spec.family == "gaussian_z2":
        return gaussian_z2(spec.n, p["sigma"], z, spec.seed), z
    if spec.family == "censored_block":
        return censored_block(spec.n, p["p"], p["delta"], z, spec.seed), z
    if spec.family == "signed_er":
        return signed_er(spec.n, p["p"], p["delta"], spec.seed), SignVector.ones(spec.n)
    if spec.family == "sbm":
        A = sbm(spec.n, p["p"], p["q"], z, spec.seed)
        mode = p.get("centering", "known")
        if mode == "known":
            return center(A, "known", p["p"], p["q"]), z
        return center(A, "estimated"), z
    if spec.family == "circulant_knn":
        return circulant_knn(spec.n, p["k"]), SignVector.ones(spec.n)
    if spec.family == "random_regular":
        return random_regular(spec.n, p["d"], spec.seed), SignVector.ones(spec.n)
    raise ValueError(f"family {spec.family!r} cannot be generated directly")
