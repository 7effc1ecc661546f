"""Seeded 64-bit randomness.

One top-level seed per run; per-face seeds are derived by folding the face
address into a splitmix64 chain, so parallel and sequential face processing
draw identical samples.
"""

from __future__ import annotations

from fractions import Fraction

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def mix(seed: int, *tags) -> int:
    """Fold integers/strings into a derived 64-bit seed."""
    state = seed & _MASK
    for tag in tags:
        if isinstance(tag, str):
            data = tag.encode()
            for b in data:
                state, out = splitmix64(state ^ b)
                state ^= out
        else:
            state, out = splitmix64(state ^ (int(tag) & _MASK))
            state ^= out
    state, out = splitmix64(state)
    return out


def face_seed(seed: int, face) -> int:
    """Derived seed for a grid face, independent of processing order."""
    return mix(seed, "face", *face.base, "|", *face.axes)


class Rng:
    """Deterministic splitmix64 stream."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def u64(self) -> int:
        self.state, out = splitmix64(self.state)
        return out

    def unit(self, bits: int = 32) -> Fraction:
        """Uniform rational strictly inside (0, 1): odd numerator over 2^(bits+1)."""
        u = self.u64() >> (64 - bits)
        return Fraction(2 * u + 1, 1 << (bits + 1))

    def rational_in(self, lo: Fraction, hi: Fraction, bits: int = 32) -> Fraction:
        return lo + (hi - lo) * self.unit(bits)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        span = hi - lo + 1
        return lo + self.u64() % span
