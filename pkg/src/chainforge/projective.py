"""Piecewise projective maps and exact pushforward of chains.

Each piece is a convex region with an (n+1)x(n+1) rational homogeneous
matrix; outside every region the map is the identity.  A simplex is first
subdivided so each fragment lies in a single region, then mapped vertex-wise
(projective maps carry simplices to simplices when the homogeneous
coordinate keeps a strict sign, which is checked per fragment).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .chains import ConvexRegion, PolyhedralChain, clip_chain
from .errors import ContinuityError, InfinitySingularity
from .linalg import ZERO, mat_vec, transpose, vdot, vnorm2
from .scalars import MassValue


@dataclass(frozen=True)
class ProjectivePiece:
    region: ConvexRegion
    matrix: tuple  # (n+1) x (n+1) rows

    def apply(self, point):
        hom = mat_vec(self.matrix, tuple(point) + (Fraction(1),))
        w = hom[-1]
        if w == 0:
            raise InfinitySingularity("vertex on the vanishing homogeneous locus")
        return tuple(x / w for x in hom[:-1]), w

    def is_affine(self) -> bool:
        last = self.matrix[-1]
        return all(x == 0 for x in last[:-1])


@dataclass(frozen=True)
class PiecewiseProjectiveMap:
    ambient: int
    pieces: tuple

    @classmethod
    def identity(cls, n: int) -> "PiecewiseProjectiveMap":
        return cls(n, ())

    @classmethod
    def single(cls, region: ConvexRegion, matrix) -> "PiecewiseProjectiveMap":
        rows = tuple(tuple(Fraction(x) for x in r) for r in matrix)
        n = len(rows) - 1
        return cls(n, (ProjectivePiece(region, rows),))

    @classmethod
    def affine(cls, region: ConvexRegion, linear, shift) -> "PiecewiseProjectiveMap":
        n = len(shift)
        rows = [tuple(Fraction(x) for x in row) + (Fraction(shift[i]),)
                for i, row in enumerate(linear)]
        rows.append(tuple([ZERO] * n + [Fraction(1)]))
        return cls(n, (ProjectivePiece(region, tuple(rows)),))

    def value_at(self, point):
        """Map value, verifying agreement of every piece containing the point.

        The identity default only applies where no region contains the
        point; identity/piece agreement on the seam is implied because the
        pieces fix their outer boundary pointwise, which this check covers
        through the piece values themselves.
        """
        vals = []
        for piece in self.pieces:
            if piece.region.contains(point):
                vals.append(piece.apply(point)[0])
        if not vals:
            return tuple(point)
        first = vals[0]
        for v in vals[1:]:
            if v != first:
                raise ContinuityError("map pieces disagree at a shared point")
        return first


def pushforward_detailed(chain: PolyhedralChain, pmap: PiecewiseProjectiveMap,
                         check_continuity: bool = True):
    """Pushforward with the fragment correspondence.

    Returns (image chain, matches); matches holds one entry per fragment:
    (source vertices, multiplicity, image vertices, piece or None for
    identity fragments).  Degenerate images are kept in the matches (their
    homotopy sweep can still be nondegenerate) but drop out of the image
    chain.  The fragment subdivision is the sequential clip against the
    piece regions in order, so results are deterministic.
    """
    n = chain.ambient
    buckets = []  # (piece or None, sub-chain)
    remaining = chain
    for piece in pmap.pieces:
        inside, remaining = clip_chain(remaining, piece.region, mode="closed")
        if not inside.is_zero:
            buckets.append((piece, inside))
        if remaining.is_zero:
            break
    if not remaining.is_zero:
        buckets.append((None, remaining))

    matches = []
    image_terms = []
    for piece, sub in buckets:
        for verts, mult in sub.term_items():
            if piece is None:
                matches.append((verts, mult, verts, None))
                image_terms.append((verts, mult))
                continue
            mapped = []
            sign_ref = None
            for v in verts:
                if check_continuity:
                    w = pmap.value_at(v)
                else:
                    w, hom = piece.apply(v)
                    hom_sign = hom > 0
                    if sign_ref is None:
                        sign_ref = hom_sign
                    elif hom_sign != sign_ref:
                        raise InfinitySingularity(
                            "homogeneous coordinate changes sign inside a region")
                mapped.append(w)
            matches.append((verts, mult, tuple(mapped), piece))
            image_terms.append((tuple(mapped), mult))
    image = PolyhedralChain.from_terms(chain.dim, n, image_terms)
    return image, matches


def pushforward(chain: PolyhedralChain, pmap: PiecewiseProjectiveMap) -> PolyhedralChain:
    return pushforward_detailed(chain, pmap)[0]


# -- certified operator-norm bounds -----------------------------------------


def _ldl_is_psd(rows) -> bool:
    """Exact rational test: is the symmetric matrix positive semidefinite?"""
    m = [list(r) for r in rows]
    n = len(m)
    for i in range(n):
        piv = m[i][i]
        if piv < 0:
            return False
        if piv == 0:
            if any(m[i][j] != 0 for j in range(i + 1, n)):
                return False
            continue
        for r in range(i + 1, n):
            f = m[r][i] / piv
            for c in range(i, n):
                m[r][c] -= f * m[i][c]
    return True


def certified_opnorm_upper(linear_rows) -> Fraction:
    """Rational upper bound on the spectral norm, tight to ~1e-9.

    Starts from a float eigenvalue estimate of A^T A and certifies candidates
    L^2 by the exact positive-semidefiniteness of L^2 I - A^T A.
    """
    rows = tuple(tuple(Fraction(x) for x in r) for r in linear_rows)
    cols = transpose(rows)
    g = tuple(tuple(vdot(c1, c2) for c2 in cols) for c1 in cols)
    n = len(g)
    # float power iteration for the starting estimate
    import numpy as np
    gf = np.array([[float(x) for x in row] for row in g], dtype=float)
    est = float(np.linalg.eigvalsh(gf)[-1]) if n else 0.0
    cand = Fraction(max(est, 0.0)).limit_denominator(10 ** 12)
    bump = Fraction(1, 10 ** 9)
    for _ in range(80):
        lam = cand * (1 + bump) + bump
        shifted = tuple(tuple((lam if i == j else ZERO) - g[i][j]
                              for j in range(n)) for i in range(n))
        if _ldl_is_psd(shifted):
            root = math.sqrt(float(lam))
            return Fraction(root * (1 + 1e-12)).limit_denominator(10 ** 12)
        bump *= 4
    raise ArithmeticError("could not certify an operator norm bound")


def lipschitz_bound(pmap: PiecewiseProjectiveMap, chain: PolyhedralChain) -> MassValue:
    """Certified upper bound for sup of the differential norm on supp(chain).

    Affine pieces get the certified spectral norm of the linear part.  A
    genuinely projective piece with value u(y) = (My + m0)/(r.y + c) has
    Du = (M - u(y) r^T)/(r.y + c), bounded by (|M| + max|u| * |r|) / min(r.y+c)
    over the fragment (the image of a fragment is the hull of its mapped
    vertices, so max|u| is certified from vertices).
    """
    n = chain.ambient
    best = MassValue.zero()
    remaining = chain
    for piece in pmap.pieces:
        inside, remaining = clip_chain(remaining, piece.region, mode="closed")
        if inside.is_zero:
            continue
        lin = [row[:-1] for row in piece.matrix[:-1]]
        if piece.is_affine():
            c = piece.matrix[-1][-1]
            scaled = [[x / c for x in row] for row in lin]
            bound = MassValue.from_fraction(certified_opnorm_upper(scaled))
        else:
            r = piece.matrix[-1][:-1]
            c = piece.matrix[-1][-1]
            norm_m = MassValue.from_fraction(certified_opnorm_upper(lin))
            norm_r = MassValue.from_sqrt(vnorm2(r))
            w_min = None
            u_max2 = ZERO
            for verts, _mult in inside.term_items():
                for v in verts:
                    w = vdot(r, v) + c
                    if w <= 0:
                        w = -w  # constant strict sign; use magnitude
                    w_min = w if w_min is None else min(w_min, w)
                    img, _ = piece.apply(v)
                    u_max2 = max(u_max2, vnorm2(img))
            u_max = MassValue.from_sqrt(u_max2)
            num = norm_m + u_max * norm_r
            bound = num.scale(Fraction(1) / w_min)
        if bound.upper() > best.upper():
            best = bound
    if not remaining.is_zero:
        one = MassValue.from_fraction(Fraction(1))
        if one.upper() > best.upper():
            best = one
    return best
