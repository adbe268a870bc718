"""Portable seeded PRNG for synthetic corpora and weight initialization.

Generated streams have to be reproducible across platforms and library
versions, so the algorithm is pinned instead of delegated to a library
generator: splitmix64 for the raw 64-bit stream, uniforms from the top
53 bits, and normals via the Box-Muller transform. Each normal consumes
exactly two uniforms (the sine branch is discarded), which keeps the
draw order trivial to document and re-implement.
"""
from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_INV53 = 2.0**-53


class SplitMix64:
    """splitmix64 stream seeded by one integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """One draw uniform on [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * _INV53

    def normal(self) -> float:
        """One standard normal draw (Box-Muller, cosine branch only)."""
        # First uniform shifted into (0, 1] so the log stays finite.
        u1 = ((self.next_u64() >> 11) + 1) * _INV53
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def uniforms(self, n: int) -> list[float]:
        return [self.uniform() for _ in range(n)]

    def normals(self, n: int) -> list[float]:
        return [self.normal() for _ in range(n)]
