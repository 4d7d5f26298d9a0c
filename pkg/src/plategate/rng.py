"""Seedable, portable random number generation for reproducible corpora.

The generator is SplitMix64 (Steele/Lea/Flood mixing constants), chosen so
the corpus byte streams can be reproduced from a seed in any language:

    state  = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output = z ^ (z >> 31)

Derived draws, all defined in terms of that 64-bit stream:
  - uniform():  (output >> 11) * 2^-53, a double in [0, 1)
  - randint(n): floor(uniform() * n)
  - gaussians:  Box-Muller on consecutive uniform pairs (u1, u2):
                r = sqrt(-2 ln(1 - u1)); z0 = r cos(2 pi u2); z1 = r sin(2 pi u2)

The vectorised block methods produce exactly the same sequence as repeated
scalar calls; a test cross-checks the two paths.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """The SplitMix64 output mix of a single 64-bit value."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Per-item seed for item `index` of a master-seeded run."""
    return mix64((master_seed ^ ((_GAMMA * (index + 1)) & _MASK)) & _MASK)


class SplitMix64:
    """Deterministic 64-bit PRNG; scalar and numpy-vectorised draws agree."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def randint(self, n: int) -> int:
        """Integer in [0, n)."""
        return int(self.uniform() * n)

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def choice(self, items):
        return items[self.randint(len(items))]

    def block_u64(self, count: int) -> np.ndarray:
        """Next `count` outputs as a uint64 array (same stream as next_u64)."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        states = np.uint64(self._state) + np.uint64(_GAMMA) * steps
        self._state = (self._state + _GAMMA * count) & _MASK
        z = states
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def block_uniform(self, count: int) -> np.ndarray:
        return (self.block_u64(count) >> np.uint64(11)) * 2.0 ** -53

    def block_gaussian(self, count: int) -> np.ndarray:
        """Next `count` standard normals via Box-Muller (pairs consumed)."""
        pairs = (count + 1) // 2
        u = self.block_uniform(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        r = np.sqrt(-2.0 * np.log(1.0 - u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * math.pi * u2)
        out[1::2] = r * np.sin(2.0 * math.pi * u2)
        return out[:count]
