"""Seedable uniform random streams.

Every stream is a PCG64 generator seeded through numpy's ``SeedSequence``
with ``(seed, chain_id)``, so results are identical across platforms and
independent chains never share state. Doubles are drawn in blocks; PCG64
consumes exactly one 64-bit output per double, so block size has no effect
on the sequence.
"""

import math

import numpy as np

from .errors import ArgumentError

_BLOCK = 4096
# smallest step of the 53-bit grid used by ``Generator.random``
_TINY = 2.0**-53


class RngStream:
    """Single-owner uniform source. Do not share across threads."""

    def __init__(self, seed=0, chain_id=0):
        seed = int(seed)
        if seed < 0 or seed >= 2**64:
            raise ArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.chain_id = int(chain_id)
        ss = np.random.SeedSequence(seed, spawn_key=(self.chain_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf = []
        self._pos = 0

    def spawn(self, chain_id):
        """A fresh stream for another chain under the same seed."""
        return RngStream(self.seed, chain_id)

    def _refill(self):
        self._buf = self._gen.random(_BLOCK).tolist()
        self._pos = 0

    def random(self):
        """u in (0, 1); an exact zero is remapped to 2**-53."""
        if self._pos >= len(self._buf):
            self._refill()
        u = self._buf[self._pos]
        self._pos += 1
        return u if u > 0.0 else _TINY

    def uniform(self, a, b):
        """v with a <= v < b."""
        if not (a < b) or not (math.isfinite(a) and math.isfinite(b)):
            raise ArgumentError(f"uniform needs finite a < b, got [{a}, {b})")
        v = a + (b - a) * self.random()
        if v >= b:
            v = math.nextafter(b, a)
        elif v < a:
            v = a
        return v

    def log_uniform01(self):
        """log u for u ~ Uniform(0, 1); always finite and <= 0."""
        return math.log(self.random())

    def __repr__(self):
        return f"RngStream(seed={self.seed}, chain_id={self.chain_id})"


def uniform(r, a, b):
    return r.uniform(a, b)


def log_uniform01(r):
    return r.log_uniform01()
