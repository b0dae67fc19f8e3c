"""Seeding utilities shared by all randomized components.

Every random draw in this package goes through numpy's counter-based
Philox (4x64) bit generator, keyed with an unsigned 64-bit seed.  Derived
seeds (per trial, per grid cell) are produced by the bit-exact SplitMix64
chain below, so that experiment tables can be reproduced from the master
seed alone, in any implementation of the same formulas.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for the 64-bit state ``x``."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, cell_index: int = 0, trial_index: int = 0) -> int:
    """Per-trial seed: splitmix64 chained over (master, cell, trial).

    The exact formula is
      s0 = splitmix64(master_seed)
      s1 = splitmix64(s0 XOR (cell_index + 1) * 0x9E3779B97F4A7C15)
      s2 = splitmix64(s1 XOR (trial_index + 1) * 0x9E3779B97F4A7C15)
    with all arithmetic modulo 2^64.
    """
    s = splitmix64(master_seed & _MASK64)
    s = splitmix64(s ^ (((cell_index + 1) * _GOLDEN) & _MASK64))
    s = splitmix64(s ^ (((trial_index + 1) * _GOLDEN) & _MASK64))
    return s


def generator(seed: int) -> np.random.Generator:
    """The package-wide RNG: Philox keyed with a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))
