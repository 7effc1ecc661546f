"""Exact rationals and error-tracked real values.

Coordinates and multiplicities are arbitrary-precision `Fraction`s throughout
the package.  The only non-rational quantities are k-volumes (square roots of
Gram determinants) and power-cost evaluations; those are carried as
`MassValue`s: a float with an absolute error bound, plus the exact rational
when one exists.
"""

from __future__ import annotations

import math
from fractions import Fraction

# Relative slack applied to every float sqrt/pow; IEEE doubles are correctly
# rounded (0.5 ulp) so 4 ulps is a generous certified margin.
_REL = 4.0 * 2.0 ** -52


def parse_rational(value) -> Fraction:
    """Accept int, Fraction, 'p/q' strings and decimal strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # JSON floats are read as their shortest decimal form.
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(fr: Fraction) -> str:
    if fr.denominator == 1:
        return str(fr.numerator)
    return f"{fr.numerator}/{fr.denominator}"


def _isqrt_exact(n: int):
    r = math.isqrt(n)
    return r if r * r == n else None


def sqrt_rational_exact(fr: Fraction):
    """Exact square root when `fr` is the square of a rational, else None."""
    if fr < 0:
        raise ValueError("negative radicand")
    rn = _isqrt_exact(fr.numerator)
    if rn is None:
        return None
    rd = _isqrt_exact(fr.denominator)
    if rd is None:
        return None
    return Fraction(rn, rd)


def nth_root_rational_exact(fr: Fraction, q: int):
    """Exact q-th root of a nonnegative rational, or None."""
    if fr < 0:
        raise ValueError("negative radicand")
    if fr == 0:
        return Fraction(0)

    def iroot(n: int):
        if n == 0:
            return 0
        r = round(n ** (1.0 / q))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** q == n:
                return cand
        return None

    rn = iroot(fr.numerator)
    if rn is None:
        return None
    rd = iroot(fr.denominator)
    if rd is None:
        return None
    return Fraction(rn, rd)


class MassValue:
    """A nonnegative real tracked as float value + absolute error bound.

    `exact` holds the rational value when the quantity is exactly rational
    (axis-aligned volumes, linear/affine/step costs); arithmetic keeps the
    exact channel alive only while every operand has one.
    """

    __slots__ = ("value", "err", "exact")

    def __init__(self, value: float, err: float = 0.0, exact: Fraction | None = None):
        self.value = float(value)
        self.err = float(err)
        self.exact = exact

    @classmethod
    def zero(cls) -> "MassValue":
        return cls(0.0, 0.0, Fraction(0))

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "MassValue":
        v = float(fr)
        return cls(v, abs(v) * _REL, fr)

    @classmethod
    def from_sqrt(cls, fr: Fraction) -> "MassValue":
        """sqrt of a nonnegative rational, exact when a perfect square."""
        ex = sqrt_rational_exact(fr)
        if ex is not None:
            return cls.from_fraction(ex)
        v = math.sqrt(float(fr))
        return cls(v, abs(v) * _REL)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def upper(self) -> float:
        return self.value + self.err

    def lower(self) -> float:
        return self.value - self.err

    def __add__(self, other: "MassValue") -> "MassValue":
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact + other.exact
        return MassValue(self.value + other.value, self.err + other.err, ex)

    def __sub__(self, other: "MassValue") -> "MassValue":
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact - other.exact
        return MassValue(self.value - other.value, self.err + other.err, ex)

    def __mul__(self, other: "MassValue") -> "MassValue":
        v = self.value * other.value
        err = (abs(self.value) * other.err + abs(other.value) * self.err
               + self.err * other.err + abs(v) * _REL)
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact * other.exact
        return MassValue(v, err, ex)

    def scale(self, fr: Fraction) -> "MassValue":
        f = float(fr)
        ex = self.exact * fr if self.exact is not None else None
        return MassValue(self.value * f, self.err * abs(f) + abs(self.value * f) * _REL, ex)

    def scale_float(self, f: float) -> "MassValue":
        return MassValue(self.value * f, self.err * abs(f) + abs(self.value * f) * _REL)

    def certified_lt(self, bound: float) -> bool:
        """True only if the value is provably below `bound`."""
        return self.upper() < bound

    def certified_le_of(self, other: "MassValue", slack: float = 0.0) -> bool:
        if self.exact is not None and other.exact is not None and slack == 0.0:
            return self.exact <= other.exact
        return self.upper() <= other.lower() + slack

    def agrees_with(self, other: "MassValue") -> bool:
        """Equality up to the combined tracked error; exact when both exact."""
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return abs(self.value - other.value) <= self.err + other.err + 1e-15 * (
            1.0 + abs(self.value) + abs(other.value))

    def __repr__(self):
        if self.exact is not None:
            return f"MassValue({format_rational(self.exact)})"
        return f"MassValue({self.value!r}±{self.err:.3g})"

    def to_json(self):
        out = {"value": self.value, "err": self.err}
        if self.exact is not None:
            out["exact"] = format_rational(self.exact)
        return out
