"""Multiplicity cost functions and their admissibility checks.

A cost prices the multiplicity of a chain: evaluation always goes through
|theta|, so evenness is structural.  Built-in families:

  linear(beta)      beta * |t|
  power(a)          |t|**a            with 0 < a <= 1
  affine(c0, c1)    c0 + c1 * |t|     for t != 0, and 0 at 0
  step              1 for t != 0, 0 at 0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .rng import Rng
from .scalars import MassValue, nth_root_rational_exact, format_rational


@dataclass(frozen=True)
class CostFunction:
    family: str
    params: tuple[Fraction, ...] = ()
    declared_alpha: Fraction | None = None
    declared_beta: Fraction | None = None  # None means "infinite"

    def __post_init__(self):
        if self.family == "linear":
            (beta,) = self.params
            if beta <= 0:
                raise ParseError("linear cost needs beta > 0")
            if self.declared_alpha is None:
                object.__setattr__(self, "declared_alpha", beta)
            if self.declared_beta is None:
                object.__setattr__(self, "declared_beta", beta)
        elif self.family == "power":
            (a,) = self.params
            if not (0 < a <= 1):
                raise ParseError("power cost needs exponent in (0, 1]")
        elif self.family == "affine":
            c0, c1 = self.params
            if c0 < 0 or c1 <= 0:
                raise ParseError("affine cost needs c0 >= 0, c1 > 0")
            if self.declared_alpha is None:
                object.__setattr__(self, "declared_alpha", c1)
        elif self.family == "step":
            pass
        else:
            raise ParseError(f"unknown cost family {self.family!r}")

    def __call__(self, theta: Fraction) -> MassValue:
        t = abs(theta)
        if t == 0:
            return MassValue.zero()
        if self.family == "linear":
            return MassValue.from_fraction(self.params[0] * t)
        if self.family == "affine":
            c0, c1 = self.params
            return MassValue.from_fraction(c0 + c1 * t)
        if self.family == "step":
            return MassValue.from_fraction(Fraction(1))
        # power: exact when |t|^p is a perfect q-th power
        a = self.params[0]
        p, q = a.numerator, a.denominator
        ex = nth_root_rational_exact(t ** p, q)
        if ex is not None:
            return MassValue.from_fraction(ex)
        v = float(t) ** float(a)
        return MassValue(v, abs(v) * 1e-14)

    def exact_on_rationals(self) -> bool:
        return self.family in ("linear", "affine", "step")

    def label(self) -> str:
        if self.family == "linear":
            return f"linear:{format_rational(self.params[0])}"
        if self.family == "power":
            return f"power:{format_rational(self.params[0])}"
        if self.family == "affine":
            return f"affine:{format_rational(self.params[0])},{format_rational(self.params[1])}"
        return "step"

    @classmethod
    def linear(cls, beta=1) -> "CostFunction":
        return cls("linear", (Fraction(beta),))

    @classmethod
    def power(cls, a) -> "CostFunction":
        return cls("power", (Fraction(a),))

    @classmethod
    def affine(cls, c0, c1) -> "CostFunction":
        return cls("affine", (Fraction(c0), Fraction(c1)))

    @classmethod
    def step(cls) -> "CostFunction":
        return cls("step")

    @classmethod
    def from_label(cls, text: str) -> "CostFunction":
        """Parse 'linear:b' | 'power:a' | 'affine:c0,c1' | 'step'."""
        from .scalars import parse_rational

        head, _, rest = text.partition(":")
        try:
            if head == "linear":
                return cls.linear(parse_rational(rest))
            if head == "power":
                return cls.power(parse_rational(rest))
            if head == "affine":
                c0, c1 = rest.split(",")
                return cls.affine(parse_rational(c0), parse_rational(c1))
            if head == "step":
                return cls.step()
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad cost spec {text!r}") from exc
        raise ParseError(f"unknown cost family {head!r}")


@dataclass
class CostReport:
    """Which admissibility conditions hold on the sampled range."""
    cost_label: str
    theta_lo: Fraction
    theta_hi: Fraction
    samples: int
    base_ok: bool            # h(0)=0, even, subadditive on sampled pairs
    linear_lower_ok: bool    # h(t) >= alpha * |t| on the range
    alpha: Fraction | None
    monotone_infinite_slope_ok: bool  # non-decreasing with h/t -> inf at 0+
    beta: Fraction | None    # sup h(t)/t when finite, else None
    failures: list = field(default_factory=list)


def _certified_alpha(cost: CostFunction, hi: Fraction) -> Fraction | None:
    """Largest certified alpha with h(t) >= alpha*t on (0, hi], per family."""
    if cost.family == "linear":
        return cost.params[0]
    if cost.family == "affine":
        return cost.params[1]
    if cost.family == "step":
        return None
    a = cost.params[0]
    if a == 1:
        return Fraction(1)
    # t^a >= t * hi^(a-1) on (0, hi]; certify via the exact root when it exists
    ex = nth_root_rational_exact(hi ** (a.numerator - a.denominator),
                                 a.denominator)
    return ex  # None when hi^(a-1) is irrational; sampling still reports


def validate_cost(cost: CostFunction, theta_lo, theta_hi, samples: int) -> CostReport:
    """Probe the admissibility conditions on [theta_lo, theta_hi].

    Family-level facts (step has no linear lower bound; a power law has one
    only on a bounded range) are asserted structurally; the samples confirm
    them pointwise and check subadditivity on random pairs.
    """
    if samples < 1:
        raise ParseError("samples must be >= 1")
    lo, hi = Fraction(theta_lo), Fraction(theta_hi)
    if hi <= lo:
        raise ParseError("empty theta range")
    rng = Rng(0xC057)
    failures = []

    base_ok = True
    if cost(Fraction(0)).value != 0.0:
        base_ok = False
        failures.append("h(0) != 0")

    pts = [lo + (hi - lo) * Fraction(i, samples) for i in range(samples + 1)]
    pts += [rng.rational_in(lo, hi) for _ in range(samples)]

    # subadditivity h(s+t) <= h(s) + h(t), compared with certified slack
    for _ in range(samples):
        s = rng.rational_in(lo, hi)
        t = rng.rational_in(lo, hi)
        lhs = cost(s + t)
        rhs = cost(s) + cost(t)
        if not lhs.certified_le_of(rhs, slack=1e-12 * (1 + rhs.value)):
            base_ok = False
            failures.append(f"subadditivity fails at {s}, {t}")
            break

    alpha = _certified_alpha(cost, max(abs(lo), abs(hi)))
    linear_lower_ok = alpha is not None
    if cost.family == "power" and cost.params[0] < 1 and alpha is None:
        # fall back to a sampled alpha = h(hi)/hi, reported uncertified
        linear_lower_ok = True
        alpha = None
    if cost.family == "step":
        linear_lower_ok = False
    if linear_lower_ok and alpha is not None:
        for t in pts:
            if t == 0:
                continue
            ht = cost(abs(t))
            bound = MassValue.from_fraction(alpha * abs(t))
            if not bound.certified_le_of(ht, slack=1e-12 * (1 + ht.value)):
                linear_lower_ok = False
                failures.append(f"h({t}) < alpha*|t|")
                break

    if cost.family == "linear":
        mono = False   # h/t constant, no infinite slope at 0+
        beta = cost.params[0]
    elif cost.family == "power":
        mono = cost.params[0] < 1
        beta = Fraction(1) if cost.params[0] == 1 else None
    elif cost.family == "affine":
        mono = True
        beta = None
    else:
        mono = True
        beta = None

    # monotonicity spot check on the positive part of the range
    prev = None
    for t in sorted(p for p in pts if p > 0):
        cur = cost(t)
        if prev is not None and cur.upper() < prev.lower() - 1e-12:
            if mono:
                mono = False
                failures.append(f"not non-decreasing near {t}")
            break
        prev = cur

    return CostReport(
        cost_label=cost.label(),
        theta_lo=lo, theta_hi=hi, samples=samples,
        base_ok=base_ok,
        linear_lower_ok=linear_lower_ok,
        alpha=alpha,
        monotone_infinite_slope_ok=mono,
        beta=beta,
        failures=failures,
    )
