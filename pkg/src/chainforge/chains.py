"""Oriented simplices and polyhedral chains with exact rational geometry.

A chain stores terms keyed by the sorted vertex tuple; the sign of the
sorting permutation is folded into the multiplicity, so two presentations of
the same oriented simplex always merge and boundary-of-boundary cancels
combinatorially, with no tolerance anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .costs import CostFunction
from .errors import DimensionMismatch
from .linalg import (ZERO, affine_rank, gram_det, vadd, vdot, vscale, vsub)
from .scalars import MassValue


def _sort_with_parity(vertices):
    """Sort vertex tuple, returning (sorted_tuple, permutation sign)."""
    idx = sorted(range(len(vertices)), key=lambda i: vertices[i])
    sign = 1
    seen = [False] * len(idx)
    for start in range(len(idx)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = idx[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(vertices[i] for i in idx), sign


@dataclass(frozen=True)
class Simplex:
    """Oriented k-simplex; vertex order encodes the orientation."""
    dim: int
    ambient: int
    vertices: tuple

    @classmethod
    def make(cls, vertices) -> "Simplex":
        verts = tuple(tuple(Fraction(x) for x in v) for v in vertices)
        k = len(verts) - 1
        n = len(verts[0]) if verts else 0
        if any(len(v) != n for v in verts):
            raise DimensionMismatch("vertices of mixed arity")
        return cls(k, n, verts)

    def is_degenerate(self) -> bool:
        return affine_rank(self.vertices) < self.dim

    def edge_vectors(self):
        base = self.vertices[0]
        return [vsub(v, base) for v in self.vertices[1:]]

    def volume(self) -> MassValue:
        """k-volume: sqrt(Gram det) / k!, exact when the root is rational."""
        if self.dim == 0:
            return MassValue.from_fraction(Fraction(1))
        g = gram_det(self.edge_vectors())
        return MassValue.from_sqrt(g).scale(Fraction(1, math.factorial(self.dim)))

    def centroid(self):
        n = len(self.vertices)
        acc = self.vertices[0]
        for v in self.vertices[1:]:
            acc = vadd(acc, v)
        return vscale(acc, Fraction(1, n))

    def diameter2(self) -> Fraction:
        best = ZERO
        for i in range(len(self.vertices)):
            for j in range(i + 1, len(self.vertices)):
                d2 = sum((a - b) ** 2 for a, b in
                         zip(self.vertices[i], self.vertices[j]))
                if d2 > best:
                    best = d2
        return best


class PolyhedralChain:
    """Finite formal sum of oriented simplices with rational multiplicities."""

    __slots__ = ("dim", "ambient", "_terms")

    def __init__(self, dim: int, ambient: int, _terms=None):
        self.dim = dim
        self.ambient = ambient
        self._terms = _terms if _terms is not None else {}

    @classmethod
    def zero(cls, dim: int, ambient: int) -> "PolyhedralChain":
        return cls(dim, ambient, {})

    @classmethod
    def from_terms(cls, dim: int, ambient: int, terms) -> "PolyhedralChain":
        """Merge identical supports, drop zero multiplicities and degenerate
        simplices.  `terms` yields (vertex sequence, multiplicity)."""
        acc: dict = {}
        for verts, mult in terms:
            mult = Fraction(mult)
            if mult == 0:
                continue
            verts = tuple(tuple(Fraction(x) for x in v) for v in verts)
            if len(verts) != dim + 1:
                raise DimensionMismatch(
                    f"term with {len(verts)} vertices in a dim-{dim} chain")
            if any(len(v) != ambient for v in verts):
                raise DimensionMismatch("vertex arity != ambient dimension")
            key, sign = _sort_with_parity(verts)
            if len(set(key)) != len(key):
                continue
            acc[key] = acc.get(key, Fraction(0)) + sign * mult
        out = {}
        for key, m in acc.items():
            if m == 0:
                continue
            if dim > 0 and affine_rank(key) < dim:
                continue
            out[key] = m
        return cls(dim, ambient, out)

    # -- structure ---------------------------------------------------------

    @property
    def terms(self):
        """Deterministic list of (Simplex, multiplicity)."""
        return [(Simplex(self.dim, self.ambient, verts), mult)
                for verts, mult in sorted(self._terms.items())]

    def term_items(self):
        return sorted(self._terms.items())

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        return (isinstance(other, PolyhedralChain) and self.dim == other.dim
                and self.ambient == other.ambient and self._terms == other._terms)

    def __add__(self, other: "PolyhedralChain") -> "PolyhedralChain":
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if (self.dim, self.ambient) != (other.dim, other.ambient):
            raise DimensionMismatch("adding chains of different dimensions")
        out = dict(self._terms)
        for key, m in other._terms.items():
            s = out.get(key, Fraction(0)) + m
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return PolyhedralChain(self.dim, self.ambient, out)

    def __neg__(self) -> "PolyhedralChain":
        return PolyhedralChain(self.dim, self.ambient,
                               {k: -m for k, m in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "PolyhedralChain":
        factor = Fraction(factor)
        if factor == 0:
            return PolyhedralChain.zero(self.dim, self.ambient)
        return PolyhedralChain(self.dim, self.ambient,
                               {k: m * factor for k, m in self._terms.items()})

    def vertices(self):
        out = set()
        for key in self._terms:
            out.update(key)
        return sorted(out)

    def bbox(self):
        """Axis-aligned bounds (lo, hi) over all vertices, or None."""
        verts = self.vertices()
        if not verts:
            return None
        lo = tuple(min(v[i] for v in verts) for i in range(self.ambient))
        hi = tuple(max(v[i] for v in verts) for i in range(self.ambient))
        return lo, hi

    # -- calculus ----------------------------------------------------------

    def boundary(self) -> "PolyhedralChain":
        """Alternating facet sum; exact, and boundary(boundary()) == 0."""
        if self.dim <= 0:
            return PolyhedralChain.zero(self.dim - 1, self.ambient)
        acc: dict = {}
        for verts, mult in self._terms.items():
            for i in range(len(verts)):
                facet = verts[:i] + verts[i + 1:]
                sign = 1 if i % 2 == 0 else -1
                s = acc.get(facet, Fraction(0)) + sign * mult
                if s == 0:
                    acc.pop(facet, None)
                else:
                    acc[facet] = s
        out = {k: m for k, m in acc.items()
               if self.dim - 1 == 0 or affine_rank(k) >= self.dim - 1}
        return PolyhedralChain(self.dim - 1, self.ambient, out)

    def mass_report(self, cost: CostFunction, canonical: bool = False):
        from .canonical import canonicalize
        chain = self if canonical else canonicalize(self)
        mass = MassValue.zero()
        h_mass = MassValue.zero()
        for verts, mult in chain._terms.items():
            vol = Simplex(chain.dim, chain.ambient, verts).volume()
            mass = mass + vol.scale(abs(mult))
            h_mass = h_mass + cost(mult) * vol
        return MassReport(mass=mass, h_mass=h_mass,
                          exact=mass.is_exact and h_mass.is_exact)

    def h_mass(self, cost: CostFunction, canonical: bool = False) -> MassValue:
        return self.mass_report(cost, canonical=canonical).h_mass

    def mass_upper_bound(self, cost: CostFunction) -> MassValue:
        """Subadditive bound sum h(theta_i) vol_i without canonical overlay."""
        h_mass = MassValue.zero()
        for verts, mult in self._terms.items():
            vol = Simplex(self.dim, self.ambient, verts).volume()
            h_mass = h_mass + cost(mult) * vol
        return h_mass

    def __repr__(self):
        return f"PolyhedralChain(dim={self.dim}, ambient={self.ambient}, terms={len(self)})"


@dataclass
class MassReport:
    """Euclidean mass and h-mass, with exactness flag.

    Both are certified intervals; `exact` is set when every contribution is
    rational (rational-volume simplices priced by linear/affine/step costs).
    """
    mass: MassValue
    h_mass: MassValue
    exact: bool

    def to_json(self):
        return {"mass": self.mass.to_json(), "h_mass": self.h_mass.to_json(),
                "exact": self.exact}


# -- convex regions and exact clipping -------------------------------------


class ConvexRegion:
    """Intersection of rational half-spaces {x : a.x <= b}."""

    __slots__ = ("halfspaces",)

    def __init__(self, halfspaces):
        self.halfspaces = tuple((tuple(Fraction(x) for x in a), Fraction(b))
                                for a, b in halfspaces)

    @classmethod
    def box(cls, lo, hi) -> "ConvexRegion":
        n = len(lo)
        hs = []
        for i in range(n):
            neg = [ZERO] * n
            neg[i] = Fraction(-1)
            hs.append((neg, -Fraction(lo[i])))
            pos = [ZERO] * n
            pos[i] = Fraction(1)
            hs.append((pos, Fraction(hi[i])))
        return cls(hs)

    def contains(self, point, strict: bool = False) -> bool:
        for a, b in self.halfspaces:
            v = vdot(a, point)
            if v > b or (strict and v == b):
                return False
        return True

    def on_boundary(self, point) -> bool:
        return self.contains(point) and not self.contains(point, strict=True)


def split_simplex_by_hyperplane(verts, normal, offset):
    """Exact partition of a simplex by {a.x = b}.

    Returns (below, on, above): lists of vertex tuples; `on` holds pieces
    lying inside the hyperplane.  Children inherit the parent orientation
    (vertex replacement along an edge scales the oriented volume positively).
    """
    below, on, above = [], [], []
    stack = [tuple(verts)]
    while stack:
        cur = stack.pop()
        signs = [vdot(normal, v) - offset for v in cur]
        if all(s <= 0 for s in signs):
            if all(s == 0 for s in signs):
                on.append(cur)
            else:
                below.append(cur)
            continue
        if all(s >= 0 for s in signs):
            above.append(cur)
            continue
        i = next(idx for idx, s in enumerate(signs) if s < 0)
        j = next(idx for idx, s in enumerate(signs) if s > 0)
        t = signs[i] / (signs[i] - signs[j])  # in (0,1): crossing point
        p = vadd(cur[i], vscale(vsub(cur[j], cur[i]), t))
        left = list(cur)
        left[j] = p
        right = list(cur)
        right[i] = p
        stack.append(tuple(left))
        stack.append(tuple(right))
    return below, on, above


def clip_chain(chain: PolyhedralChain, region: ConvexRegion, mode: str = "closed"):
    """Split a chain against a convex region.

    Returns (inside, outside) as chains.  The two parts tile the input
    exactly; pieces lying inside a bounding hyperplane belong to `inside`
    for mode 'closed' and to `outside` for mode 'open'.
    """
    if mode not in ("open", "closed"):
        raise ValueError(f"bad clip mode {mode!r}")
    inside_terms = []
    outside_terms = []
    for verts, mult in chain.term_items():
        pieces = [verts]
        for normal, offset in region.halfspaces:
            nxt = []
            for piece in pieces:
                below, on, above = split_simplex_by_hyperplane(piece, normal, offset)
                nxt.extend(below)
                if mode == "closed":
                    nxt.extend(on)
                else:
                    outside_terms.extend((p, mult) for p in on)
                outside_terms.extend((p, mult) for p in above)
            pieces = nxt
            if not pieces:
                break
        inside_terms.extend((p, mult) for p in pieces)
    inside = PolyhedralChain.from_terms(chain.dim, chain.ambient, inside_terms)
    outside = PolyhedralChain.from_terms(chain.dim, chain.ambient, outside_terms)
    return inside, outside


def restrict(chain: PolyhedralChain, region: ConvexRegion, mode: str = "closed") -> PolyhedralChain:
    """Restriction of the chain to a convex region (exact clipping)."""
    return clip_chain(chain, region, mode)[0]


def restrict_outside(chain: PolyhedralChain, region: ConvexRegion, mode: str = "closed") -> PolyhedralChain:
    """Complementary restriction; together with `restrict` tiles the chain."""
    return clip_chain(chain, region, mode)[1]
