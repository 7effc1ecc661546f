"""Exact linear algebra over rationals: tuples of Fractions as vectors."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

ZERO = Fraction(0)
ONE = Fraction(1)


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(u, s):
    return tuple(a * s for a in u)


def vdot(u, v):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def vnorm2(u):
    return vdot(u, u)


def mat_vec(rows, v):
    return tuple(vdot(r, v) for r in rows)


def mat_mul(a_rows, b_rows):
    bt = list(zip(*b_rows))
    return tuple(tuple(vdot(r, c) for c in bt) for r in a_rows)


def transpose(rows):
    return tuple(zip(*rows))


def det(rows):
    """Determinant by fraction-free-ish Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = ONE
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / pv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    out = sign
    for i in range(n):
        out *= m[i][i]
    return out


def solve(rows, rhs):
    """Solve a square rational system exactly; None if singular."""
    n = len(rows)
    m = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[i][n] for i in range(n))


def inverse(rows):
    n = len(rows)
    cols = []
    for j in range(n):
        e = [ZERO] * n
        e[j] = ONE
        col = solve(rows, e)
        if col is None:
            return None
        cols.append(col)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, nrows):
            if m[rr][c] != 0:
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for rr in range(nrows):
            if rr != r and m[rr][c]:
                f = m[rr][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in m[:r]), pivots


def rank(rows):
    return len(rref(rows)[1])


def gram_det(vectors):
    """det of the Gram matrix of the given vectors (squared k-volume * (k!)^2)."""
    g = tuple(tuple(vdot(u, v) for v in vectors) for u in vectors)
    return det(g)


def affine_rank(points):
    """Dimension of the affine hull spanned by the points."""
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([vsub(p, base) for p in points[1:]])


def gram_schmidt(vectors):
    """Pairwise-orthogonal rational spanning set (no normalization)."""
    out = []
    for v in vectors:
        w = v
        for u in out:
            d = vnorm2(u)
            w = vsub(w, vscale(u, vdot(w, u) / d))
        if any(x != 0 for x in w):
            out.append(w)
    return out


def project_affine(point, base, orth_basis):
    """Orthogonal projection of `point` onto base + span(orth_basis)."""
    d = vsub(point, base)
    proj = base
    for u in orth_basis:
        proj = vadd(proj, vscale(u, vdot(d, u) / vnorm2(u)))
    return proj


def dist2_point_affine(point, base, basis):
    """Exact squared distance from a point to an affine subspace."""
    orth = gram_schmidt(basis)
    proj = project_affine(point, base, orth)
    return vnorm2(vsub(point, proj))


def dist2_point_simplex(point, verts):
    """Exact squared distance to the closed convex hull of `verts`.

    Enumerates faces: the minimizer lies on some face whose affine-hull
    foot point has nonnegative barycentric coordinates.
    """
    best = None
    idx = range(len(verts))
    for size in range(1, len(verts) + 1):
        for sub in combinations(idx, size):
            pts = [verts[i] for i in sub]
            if size == 1:
                d2 = vnorm2(vsub(point, pts[0]))
                if best is None or d2 < best:
                    best = d2
                continue
            base = pts[0]
            basis = [vsub(p, base) for p in pts[1:]]
            g = tuple(tuple(vdot(u, v) for v in basis) for u in basis)
            rhs = tuple(vdot(vsub(point, base), u) for u in basis)
            lam = solve(g, rhs)
            if lam is None:
                continue
            if any(l < 0 for l in lam) or sum(lam) > 1:
                continue
            foot = base
            for l, u in zip(lam, basis):
                foot = vadd(foot, vscale(u, l))
            d2 = vnorm2(vsub(point, foot))
            if best is None or d2 < best:
                best = d2
    return best


def dist2_simplex_simplex(verts_a, verts_b):
    """Exact squared distance between two closed simplices (small dims).

    The minimum is attained on a pair of faces; enumerate all pairs, solve
    the normal equations on the joint affine hulls, keep feasible solutions.
    Vertex-vertex pairs guarantee a feasible candidate exists.
    """
    best = None
    for sa in range(1, len(verts_a) + 1):
        for sub_a in combinations(range(len(verts_a)), sa):
            pa = [verts_a[i] for i in sub_a]
            for sb in range(1, len(verts_b) + 1):
                for sub_b in combinations(range(len(verts_b)), sb):
                    pb = [verts_b[i] for i in sub_b]
                    d2 = _dist2_faces(pa, pb)
                    if d2 is not None and (best is None or d2 < best):
                        best = d2
    return best


def _dist2_faces(pa, pb):
    base_a, base_b = pa[0], pb[0]
    ba = [vsub(p, base_a) for p in pa[1:]]
    bb = [vsub(p, base_b) for p in pb[1:]]
    na, nb = len(ba), len(bb)
    if na == 0 and nb == 0:
        return vnorm2(vsub(base_a, base_b))
    # Minimize |base_a + A s - base_b - B t|^2 over s, t.
    diff = vsub(base_b, base_a)
    basis = ba + [vscale(v, -1) for v in bb]
    g = tuple(tuple(vdot(u, v) for v in basis) for u in basis)
    rhs = tuple(vdot(diff, u) for u in basis)
    sol = solve(g, rhs)
    if sol is None:
        return None
    s, t = sol[:na], sol[na:]
    if any(x < 0 for x in s) or sum(s, ZERO) > 1:
        return None
    if any(x < 0 for x in t) or sum(t, ZERO) > 1:
        return None
    pt_a = base_a
    for l, u in zip(s, ba):
        pt_a = vadd(pt_a, vscale(u, l))
    pt_b = base_b
    for l, u in zip(t, bb):
        pt_b = vadd(pt_b, vscale(u, l))
    return vnorm2(vsub(pt_a, pt_b))


def hull_key(points):
    """Canonical key for the affine hull through `points`.

    Returns (dim, anchor, basis) where `basis` is the RREF basis of the
    direction space and `anchor` the orthogonal projection of the origin
    onto the hull.  Depends only on the hull, not the presentation.
    """
    base = points[0]
    diffs = [vsub(p, base) for p in points[1:]]
    basis, _ = rref(diffs)
    basis = tuple(b for b in basis if any(x != 0 for x in b))
    orth = gram_schmidt(basis)
    anchor = project_affine(tuple(ZERO for _ in base), base, orth)
    return (len(basis), anchor, basis)


def coords_in_hull(point, anchor, basis):
    """Exact coordinates s with point = anchor + sum s_i basis_i."""
    g = tuple(tuple(vdot(u, v) for v in basis) for u in basis)
    rhs = tuple(vdot(vsub(point, anchor), u) for u in basis)
    sol = solve(g, rhs)
    if sol is None:
        raise ValueError("degenerate hull basis")
    return sol


def lift_from_hull(s, anchor, basis):
    p = anchor
    for si, b in zip(s, basis):
        p = vadd(p, vscale(b, si))
    return p
