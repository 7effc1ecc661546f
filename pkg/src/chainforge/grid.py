"""Cubical grids, face addressing, and support classification.

Faces are addressed combinatorially (integer lattice base + free-axis set);
geometric realizations are derived on demand, so predicates stay exact and
faces stay hashable.  A frame's columns must be pairwise orthogonal rational
vectors; equal lengths are required only for user-facing grids (`is_uniform`)
because rational equal-norm orthogonal frames do not exist for every tilted
hull — internal local grids use per-axis lengths instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .canonical import canonicalize
from .chains import ConvexRegion, PolyhedralChain, Simplex, split_simplex_by_hyperplane
from .costs import CostFunction
from .errors import GridError
from .linalg import ZERO, vadd, vdot, vnorm2, vscale, vsub
from .scalars import MassValue


@dataclass(frozen=True)
class Grid:
    """origin + side * sum_i t_i col_i, t in lattice coordinates."""
    origin: tuple
    frame: tuple  # columns
    side: Fraction

    @classmethod
    def make(cls, origin, frame_cols, side) -> "Grid":
        origin = tuple(Fraction(x) for x in origin)
        cols = tuple(tuple(Fraction(x) for x in c) for c in frame_cols)
        side = Fraction(side)
        if side <= 0:
            raise GridError("grid side must be positive")
        n = len(origin)
        if len(cols) != n or any(len(c) != n for c in cols):
            raise GridError("frame must be square and match the origin arity")
        for i in range(n):
            if vnorm2(cols[i]) == 0:
                raise GridError("zero frame column")
            for j in range(i + 1, n):
                if vdot(cols[i], cols[j]) != 0:
                    raise GridError("frame columns must be pairwise orthogonal")
        return cls(origin, cols, side)

    @classmethod
    def unit(cls, n: int, side=1, origin=None) -> "Grid":
        origin = origin or [0] * n
        cols = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.make(origin, cols, side)

    @property
    def n(self) -> int:
        return len(self.origin)

    def is_uniform(self) -> bool:
        norms = {vnorm2(c) for c in self.frame}
        return len(norms) == 1

    def axis_len2(self, i: int) -> Fraction:
        return self.side ** 2 * vnorm2(self.frame[i])

    def axis_len(self, i: int) -> MassValue:
        return MassValue.from_sqrt(self.axis_len2(i))

    def max_axis_len(self) -> MassValue:
        return MassValue.from_sqrt(max(self.axis_len2(i) for i in range(self.n)))

    def min_axis_len2(self) -> Fraction:
        return min(self.axis_len2(i) for i in range(self.n))

    def to_lattice(self, point) -> tuple:
        d = vsub(point, self.origin)
        return tuple(vdot(self.frame[i], d) / (vnorm2(self.frame[i]) * self.side)
                     for i in range(self.n))

    def to_world(self, t) -> tuple:
        p = self.origin
        for ti, col in zip(t, self.frame):
            p = vadd(p, vscale(col, ti * self.side))
        return p

    def axis_plane(self, i: int, value) -> tuple:
        """World halfspace data (normal, offset) for t_i(x) <= value."""
        col = self.frame[i]
        scale = vnorm2(col) * self.side
        return col, vdot(col, self.origin) + Fraction(value) * scale

    def scaled(self, factor) -> "Grid":
        return Grid(self.origin, self.frame, self.side * Fraction(factor))


@dataclass(frozen=True, order=True)
class FaceId:
    """Relatively open face: base lattice vector + sorted free-axis set."""
    axes: tuple
    base: tuple

    @classmethod
    def make(cls, base, axes) -> "FaceId":
        return cls(tuple(sorted(axes)), tuple(int(b) for b in base))

    @property
    def dim(self) -> int:
        return len(self.axes)

    def pretty(self) -> str:
        return "a=(%s);S={%s}" % (",".join(str(b) for b in self.base),
                                  ",".join(str(a) for a in self.axes))

    @classmethod
    def parse(cls, text: str) -> "FaceId":
        try:
            apart, spart = text.split(";")
            base = [int(x) for x in apart.strip()[3:-1].split(",") if x.strip()]
            inner = spart.strip()[3:-1]
            axes = [int(x) for x in inner.split(",") if x.strip()]
            return cls.make(base, axes)
        except Exception as exc:
            raise GridError(f"bad face spec {text!r}") from exc

    def lattice_bounds(self):
        lo, hi = [], []
        for i, b in enumerate(self.base):
            if i in self.axes:
                lo.append(Fraction(b))
                hi.append(Fraction(b + 1))
            else:
                lo.append(Fraction(b))
                hi.append(Fraction(b))
        return tuple(lo), tuple(hi)

    def closure_contains_lattice(self, t) -> bool:
        for i, b in enumerate(self.base):
            if i in self.axes:
                if not (b <= t[i] <= b + 1):
                    return False
            elif t[i] != b:
                return False
        return True


def face_region(grid: Grid, face: FaceId) -> ConvexRegion:
    """World half-space description of the closed face."""
    lo, hi = face.lattice_bounds()
    hs = []
    for i in range(grid.n):
        a, b = grid.axis_plane(i, hi[i])
        hs.append((a, b))
        a, b = grid.axis_plane(i, lo[i])
        hs.append((tuple(-x for x in a), -b))
    return ConvexRegion(hs)


def face_realization(grid: Grid, face: FaceId) -> PolyhedralChain:
    """The face as a chain of dim(face)-simplices with multiplicity 1,
    oriented by the ascending free-axis order."""
    j = face.dim
    lo, _hi = face.lattice_bounds()
    corners = {}
    for bits in product((0, 1), repeat=j):
        t = list(lo)
        for bit, axis in zip(bits, face.axes):
            t[axis] += bit
        corners[bits] = grid.to_world(t)
    if j == 0:
        return PolyhedralChain.from_terms(0, grid.n, [((corners[()],), 1)])
    terms = []
    for perm in _perms(j):
        sign = _perm_sign(perm)
        verts = [corners[(0,) * j]]
        cur = [0] * j
        for axis in perm:
            cur[axis] = 1
            verts.append(corners[tuple(cur)])
        terms.append((tuple(verts), sign))
    return PolyhedralChain.from_terms(j, grid.n, terms)


def _perms(j):
    import itertools
    return itertools.permutations(range(j))


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def faces_meeting(grid: Grid, lattice_lo, lattice_hi, j: int):
    """All j-faces whose relatively open interior intersects the closed
    lattice box, in lex order."""
    n = grid.n
    if not (0 <= j <= n):
        raise GridError(f"face dimension {j} out of range")
    lo = [Fraction(x) for x in lattice_lo]
    hi = [Fraction(x) for x in lattice_hi]
    out = []
    for axes in combinations(range(n), j):
        ranges = []
        for i in range(n):
            if i in axes:
                # open span (a, a+1) must meet [lo, hi]: a < hi and a+1 > lo
                a_min = int(lo[i]) if lo[i].denominator == 1 else math.floor(lo[i])
                a_max = int(hi[i]) - 1 if hi[i].denominator == 1 else math.floor(hi[i])
            else:
                a_min = math.ceil(lo[i])
                a_max = math.floor(hi[i])
            if a_min > a_max:
                ranges = None
                break
            ranges.append(range(a_min, a_max + 1))
        if ranges is None:
            continue
        for base in product(*ranges):
            out.append(FaceId.make(base, axes))
    out.sort()
    return out


def omega_faces(face: FaceId, n: int):
    """Every strictly-higher-dimensional face having this face on its boundary."""
    s = set(face.axes)
    rest = [i for i in range(n) if i not in s]
    out = []
    for extra in range(1, len(rest) + 1):
        for added in combinations(rest, extra):
            for offsets in product((-1, 0), repeat=extra):
                base = list(face.base)
                for ax, off in zip(added, offsets):
                    base[ax] += off
                out.append(FaceId.make(base, s | set(added)))
    out.sort()
    return out


@dataclass(frozen=True)
class FaceRegions:
    """The face, its higher-face union omega, and the closed complement sigma.

    sigma is unbounded so it is represented by the predicate "the containing
    face is not in omega"; omega is finite and explicit.
    """
    face: FaceId
    omega: tuple

    def sigma_contains(self, grid: Grid, point) -> bool:
        return locate_face(grid, point) not in set(self.omega)

    def omega_contains(self, grid: Grid, point) -> bool:
        return locate_face(grid, point) in set(self.omega)


def face_regions(grid: Grid, face: FaceId) -> FaceRegions:
    return FaceRegions(face, tuple(omega_faces(face, grid.n)))


def locate_face(grid: Grid, point) -> FaceId:
    """The unique relatively open face containing the point."""
    t = grid.to_lattice(point)
    base = []
    axes = []
    for i, ti in enumerate(t):
        if ti.denominator == 1:
            base.append(int(ti))
        else:
            base.append(math.floor(ti))
            axes.append(i)
    return FaceId.make(base, axes)


def split_by_grid(chain: PolyhedralChain, grid: Grid):
    """Cut every simplex along the grid hyperplanes crossing it.

    Returns a list of (vertex tuple, multiplicity, FaceId): after cutting,
    the relative interior of each piece lies in exactly one open face, found
    by locating the centroid.
    """
    out = []
    for verts, mult in chain.term_items():
        ts = [grid.to_lattice(v) for v in verts]
        pieces = [verts]
        for i in range(grid.n):
            lo = min(t[i] for t in ts)
            hi = max(t[i] for t in ts)
            planes = range(math.floor(lo) + 1, math.ceil(hi))
            for m in planes:
                normal, offset = grid.axis_plane(i, m)
                nxt = []
                for piece in pieces:
                    below, on, above = split_simplex_by_hyperplane(piece, normal, offset)
                    nxt.extend(below)
                    nxt.extend(on)
                    nxt.extend(above)
                pieces = nxt
        for piece in pieces:
            simp = Simplex(chain.dim, chain.ambient, piece)
            if simp.is_degenerate():
                continue
            face = locate_face(grid, simp.centroid())
            out.append((piece, mult, face))
    return out


@dataclass
class SupportReport:
    """Which open faces carry chain mass, grouped by face dimension."""
    faces_by_dim: dict
    pieces_by_face: dict
    skeleton_dim: int

    def faces(self, j: int):
        return self.faces_by_dim.get(j, [])

    def face_mass(self, face: FaceId, cost: CostFunction, dim: int, ambient: int) -> MassValue:
        total = MassValue.zero()
        for verts, mult in self.pieces_by_face.get(face, []):
            vol = Simplex(dim, ambient, verts).volume()
            total = total + cost(mult) * vol
        return total

    def max_face_dim_above(self, k: int) -> int | None:
        dims = [j for j in self.faces_by_dim if j > k]
        return max(dims) if dims else None


def classify_support(grid: Grid, chain: PolyhedralChain, assume_canonical: bool = False) -> SupportReport:
    """Faces whose relatively open interior meets the support with positive
    measure, and the smallest skeleton containing the support."""
    work = chain if assume_canonical else canonicalize(chain)
    faces_by_dim: dict = {}
    pieces_by_face: dict = {}
    for verts, mult, face in split_by_grid(work, grid):
        pieces_by_face.setdefault(face, []).append((verts, mult))
        faces_by_dim.setdefault(face.dim, set()).add(face)
    faces_by_dim = {j: sorted(fs) for j, fs in faces_by_dim.items()}
    skel = max(faces_by_dim) if faces_by_dim else -1
    return SupportReport(faces_by_dim, pieces_by_face, skel)
