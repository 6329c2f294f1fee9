"""Counter-based, splittable pseudo-random number generator.

The generator is fully specified here so that seeds are portable across
languages and platforms:

    mix(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
             z ^= z >> 27;  z *= 0x94D049BB133111EB
             z ^= z >> 31                                (SplitMix64 finalizer)

    base(seed, stream) = mix(mix(seed XOR 0xA3EC647659359ACD)
                             + stream * 0x9E3779B97F4A7C15)
    word(i)            = mix(base + (i + 1) * 0x9E3779B97F4A7C15)

with all arithmetic modulo 2^64. ``word(i)`` for i = 0, 1, 2, ... is the raw
output sequence; uniform doubles take the top 53 bits. Separate ``stream``
values give statistically independent substreams of the same seed, and the
mapping from (seed, stream, counter) to output is stateless, so any slice of
the sequence can be generated on any worker.

Normal deviates use the Box-Muller transform (two uniforms per pair), which
keeps the uniform-word consumption deterministic.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SEED_XOR = np.uint64(0xA3EC647659359ACD)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO53 = float(1 << 53)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class CounterStream:
    """Sequential view over one (seed, stream) output sequence."""

    def __init__(self, seed: int, stream: int = 0, counter: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        self.counter = int(counter)
        with np.errstate(over="ignore"):
            s = np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF) ^ _SEED_XOR
            base = _mix(_mix(np.array([s], dtype=np.uint64))
                        + np.uint64(self.stream & 0xFFFFFFFFFFFFFFFF) * _GOLDEN)
        self._base = base[0]

    def words(self, k: int) -> np.ndarray:
        """Next k raw 64-bit words."""
        idx = np.arange(self.counter + 1, self.counter + k + 1, dtype=np.uint64)
        self.counter += k
        with np.errstate(over="ignore"):
            return _mix(self._base + idx * _GOLDEN)

    def uniforms(self, k: int) -> np.ndarray:
        """Next k doubles, uniform on [0, 1)."""
        return (self.words(k) >> np.uint64(11)).astype(np.float64) / _TWO53

    def normals(self, k: int) -> np.ndarray:
        """Next k standard normal deviates (Box-Muller)."""
        m = (k + 1) // 2
        u1 = 1.0 - self.uniforms(m)  # (0, 1], keeps the log finite
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        ang = 2.0 * np.pi * u2
        return np.concatenate([r * np.cos(ang), r * np.sin(ang)])[:k]

    def spawn(self, stream: int) -> "CounterStream":
        """Fresh substream of the same seed, starting at counter 0."""
        return CounterStream(self.seed, stream)
