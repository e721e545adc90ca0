"""Deterministic seeded random number generation.

The generator is a keyed SplitMix64 counter sequence. It is implemented with
plain Python integers so that every draw is bit-for-bit reproducible across
platforms and trivially portable to other languages. The full algorithm,
the draw-to-value mappings, and frozen test vectors live in
``docs/determinism.md``.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_TWO64 = 1 << 64


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (bijective on 64-bit integers)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class SeededRng:
    """Reproducible random stream identified by a (seed, stream_id) pair.

    Two instances built from the same pair yield identical draw sequences;
    instances with different stream ids diverge from the very first draw
    (the key derivation is injective in stream_id for a fixed seed).
    Instances are single-owner: never share one across concurrent tasks.
    """

    __slots__ = ("seed", "stream_id", "_state")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = seed & _MASK64
        self.stream_id = stream_id & _MASK64
        self._state = mix64((mix64(self.seed) + self.stream_id) & _MASK64)

    def next_u64(self) -> int:
        """Next raw 64-bit output."""
        self._state = (self._state + _GAMMA) & _MASK64
        return mix64(self._state)

    def uniform01(self) -> float:
        """Uniform float in [0, 1), using the top 53 bits of one raw draw."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform_range(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi); consumes exactly one raw draw."""
        return lo + self.uniform01() * (hi - lo)

    def randint(self, a: int, b: int) -> int:
        """Uniform integer in [a, b] inclusive, unbiased via modulo rejection.

        Consumes at least one raw draw, even when a == b.
        """
        if a > b:
            raise ValueError(f"randint bounds inverted: [{a}, {b}]")
        r = b - a + 1
        bound = _TWO64 - (_TWO64 % r)
        while True:
            x = self.next_u64()
            if x < bound:
                return a + (x % r)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream_id={self.stream_id})"
