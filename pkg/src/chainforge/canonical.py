"""Canonical form of polyhedral chains.

Canonical means: within each affine hull the supports of distinct terms have
pairwise measure-zero intersection, so the multiplicity of every term IS the
pointwise multiplicity of the chain there.  Achieved by a 1D interval overlay
on each line (k=1) and an incremental convex-piece overlay inside each
2-plane (k=2).  For other dimensions only identical supports merge; if
distinct terms genuinely overlap there, UnsupportedDimension is raised.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .chains import PolyhedralChain, split_simplex_by_hyperplane
from .errors import UnsupportedDimension
from .linalg import (ZERO, coords_in_hull, hull_key, lift_from_hull, solve,
                     vdot, vnorm2, vsub)

# -- exact 2D convex polygon helpers ----------------------------------------


def _area2(poly):
    """Twice the signed area of a polygon given in order."""
    acc = ZERO
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        acc += x0 * y1 - x1 * y0
    return acc


def _clip_halfplane(poly, a, b, keep_le=True):
    """Sutherland-Hodgman clip of a convex polygon against a.x <= b (or >=)."""
    if not poly:
        return None
    out = []
    n = len(poly)
    vals = [vdot(a, p) - b for p in poly]
    if not keep_le:
        vals = [-v for v in vals]
    for i in range(n):
        p, vp = poly[i], vals[i]
        q, vq = poly[(i + 1) % n], vals[(i + 1) % n]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append(tuple(pi + t * (qi - pi) for pi, qi in zip(p, q)))
    out = _dedupe(out)
    return out if len(out) >= 3 else None


def _dedupe(poly):
    out = []
    for p in poly:
        if not out or p != out[-1]:
            out.append(p)
    if out and out[0] == out[-1]:
        out.pop()
    return out


def _strip_collinear(poly):
    out = []
    n = len(poly)
    for i in range(n):
        prev, cur, nxt = poly[i - 1], poly[i], poly[(i + 1) % n]
        ux, uy = cur[0] - prev[0], cur[1] - prev[1]
        vx, vy = nxt[0] - cur[0], nxt[1] - cur[1]
        if ux * vy - uy * vx != 0:
            out.append(cur)
    return out


def _edges_halfplanes(poly):
    """Half-planes whose intersection is the CCW polygon, as (a, b): a.x <= b."""
    hs = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        # inward normal for CCW is left of (q - p); emit the <= form
        a = (q[1] - p[1], -(q[0] - p[0]))
        hs.append((a, a[0] * p[0] + a[1] * p[1]))
    return hs


def _poly_minus(poly, halfplanes):
    """Convex pieces of poly outside the convex region cut by halfplanes."""
    out = []
    cur = poly
    for a, b in halfplanes:
        piece = _clip_halfplane(cur, a, b, keep_le=False)
        if piece is not None and _area2(piece) != 0:
            out.append(piece)
        cur = _clip_halfplane(cur, a, b, keep_le=True)
        if cur is None:
            break
    return out


def _poly_intersect(poly, halfplanes):
    cur = poly
    for a, b in halfplanes:
        cur = _clip_halfplane(cur, a, b, keep_le=True)
        if cur is None:
            return None
    if _area2(cur) == 0:
        return None
    return cur


def _bbox(poly):
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return min(xs), min(ys), max(xs), max(ys)


def _bbox_disjoint(b0, b1):
    return b0[2] < b1[0] or b1[2] < b0[0] or b0[3] < b1[1] or b1[3] < b0[1]


def _overlay_plane(triangles):
    """Incremental overlay of coplanar triangles given in 2D coordinates.

    `triangles` is a list of (p0, p1, p2, mult).  Maintains a list of convex
    CCW pieces with pairwise disjoint interiors; each incoming triangle is
    intersected against the existing pieces, multiplicities summing on
    overlaps.  Returns the surviving pieces fan-triangulated.
    """
    pieces = []  # (polygon CCW, bbox, mult)
    for p0, p1, p2, mult in triangles:
        tri = [p0, p1, p2]
        if _area2(tri) < 0:
            tri = [p0, p2, p1]
            mult = -mult
        elif _area2(tri) == 0:
            continue
        tri_hs = _edges_halfplanes(tri)
        tri_bb = _bbox(tri)
        frags = [(tri, tri_bb)]
        nxt = []
        for poly, bb, pmult in pieces:
            if not frags or _bbox_disjoint(bb, tri_bb):
                nxt.append((poly, bb, pmult))
                continue
            cut = _poly_intersect(poly, tri_hs)
            if cut is None:
                nxt.append((poly, bb, pmult))
                continue
            for rest in _poly_minus(poly, tri_hs):
                nxt.append((rest, _bbox(rest), pmult))
            merged = pmult + mult
            if merged != 0:
                nxt.append((cut, _bbox(cut), merged))
            poly_hs = _edges_halfplanes(poly)
            frags = [(g, _bbox(g))
                     for f, _fb in frags
                     for g in _poly_minus(f, poly_hs)]
        for f, fb in frags:
            nxt.append((f, fb, mult))
        pieces = nxt
    out = []
    for poly, _bb, mult in pieces:
        poly = _strip_collinear(poly)
        if len(poly) < 3:
            continue
        for i in range(1, len(poly) - 1):
            out.append((poly[0], poly[i], poly[i + 1], mult))
    return out


# -- per-dimension overlays --------------------------------------------------


def _canonical_lines(chain: PolyhedralChain) -> PolyhedralChain:
    groups: dict = {}
    for verts, mult in chain.term_items():
        v0, v1 = verts
        d = vsub(v1, v0)
        scale = math.lcm(*(x.denominator for x in d))
        ints = [int(x * scale) for x in d]
        g = math.gcd(*ints)
        ints = [x // g for x in ints]
        lead = next(x for x in ints if x != 0)
        if lead < 0:
            ints = [-x for x in ints]
        dcan = tuple(Fraction(x) for x in ints)
        anchor = vsub(v0, tuple(di * (vdot(v0, dcan) / vnorm2(dcan)) for di in dcan))
        key = (anchor, dcan)
        t0 = vdot(vsub(v0, anchor), dcan) / vnorm2(dcan)
        t1 = vdot(vsub(v1, anchor), dcan) / vnorm2(dcan)
        groups.setdefault(key, []).append((t0, t1, mult))

    terms = []
    for (anchor, dcan) in sorted(groups):
        segs = groups[(anchor, dcan)]
        cuts = sorted({t for t0, t1, _m in segs for t in (t0, t1)})
        spans = []
        for lo, hi in zip(cuts, cuts[1:]):
            mid = (lo + hi) / 2
            total = ZERO
            for t0, t1, m in segs:
                a, b = (t0, t1) if t0 < t1 else (t1, t0)
                if a < mid < b:
                    total += m if t0 < t1 else -m
            spans.append([lo, hi, total])
        merged = []
        for span in spans:
            if merged and merged[-1][2] == span[2] and merged[-1][1] == span[0]:
                merged[-1][1] = span[1]
            else:
                merged.append(span)
        for lo, hi, total in merged:
            if total != 0:
                a = tuple(x + lo * di for x, di in zip(anchor, dcan))
                b = tuple(x + hi * di for x, di in zip(anchor, dcan))
                terms.append(((a, b), total))
    return PolyhedralChain.from_terms(chain.dim, chain.ambient, terms)


def _canonical_planes(chain: PolyhedralChain) -> PolyhedralChain:
    groups: dict = {}
    for verts, mult in chain.term_items():
        dim, anchor, basis = hull_key(verts)
        key = (anchor, basis)
        s = [coords_in_hull(v, anchor, basis) for v in verts]
        groups.setdefault(key, []).append((s[0], s[1], s[2], mult))

    terms = []
    for (anchor, basis) in sorted(groups):
        tris = _overlay_plane(groups[(anchor, basis)])
        for p0, p1, p2, mult in tris:
            w = tuple(lift_from_hull(p, anchor, basis) for p in (p0, p1, p2))
            terms.append((w, mult))
    return PolyhedralChain.from_terms(chain.dim, chain.ambient, terms)


def _simplices_overlap(verts_a, verts_b, anchor, basis):
    """Positive-volume intersection test for same-hull simplices (any dim)."""
    k = len(basis)
    sa = [coords_in_hull(v, anchor, basis) for v in verts_a]
    sb = [coords_in_hull(v, anchor, basis) for v in verts_b]
    pieces = [tuple(sa)]
    # clip A by each facet halfspace of B (in hull coordinates)
    for i in range(k + 1):
        face = [sb[j] for j in range(k + 1) if j != i]
        base = face[0]
        rows = [vsub(p, base) for p in face[1:]]
        normal = _facet_normal(rows, k)
        if normal is None:
            return False
        side = vdot(normal, vsub(sb[i], base))
        if side == 0:
            return False
        if side < 0:
            normal = tuple(-x for x in normal)
        offset = vdot(normal, base)
        nxt = []
        for piece in pieces:
            _below, _on, above = split_simplex_by_hyperplane(piece, normal, offset)
            nxt.extend(above)
        pieces = nxt
        if not pieces:
            return False
    from .linalg import affine_rank
    return any(affine_rank(p) == k for p in pieces)


def _facet_normal(rows, k):
    """A vector orthogonal to the span of rows inside R^k (corank 1)."""
    from .linalg import rref
    red, pivots = rref(rows)
    free = [c for c in range(k) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    normal = [ZERO] * k
    normal[f] = Fraction(1)
    for r, c in enumerate(pivots):
        normal[c] = -red[r][f]
    return tuple(normal)


def canonicalize(chain: PolyhedralChain, allow_partial: bool = False) -> PolyhedralChain:
    """Return the canonical form; idempotent and multiplicity-preserving.

    allow_partial skips the overlap guarantee for dims without an overlay
    (identical supports still merge); used for auxiliary higher-dim chains
    where only subadditive mass bounds are reported.
    """
    merged = PolyhedralChain.from_terms(chain.dim, chain.ambient,
                                        chain.term_items())
    if merged.is_zero or chain.dim <= 0:
        return merged
    if chain.dim == 1:
        return _canonical_lines(merged)
    if chain.dim == 2:
        return _canonical_planes(merged)
    if allow_partial:
        return merged
    # no overlay routine: verify distinct terms do not overlap
    by_hull: dict = {}
    for verts, mult in merged.term_items():
        _dim, anchor, basis = hull_key(verts)
        by_hull.setdefault((anchor, basis), []).append(verts)
    for (anchor, basis), members in by_hull.items():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if _simplices_overlap(members[i], members[j], anchor, basis):
                    raise UnsupportedDimension(
                        f"overlay required for dim {chain.dim} chain")
    return merged


def chains_equal(a: PolyhedralChain, b: PolyhedralChain) -> bool:
    """Exact equality as currents (canonical difference is empty)."""
    return canonicalize(a - b).is_zero
