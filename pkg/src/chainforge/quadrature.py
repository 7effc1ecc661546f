"""Adaptive quadrature of the singular factor |y - a|^(-p) over simplices.

This is the one float-heavy inner loop of the package: center selection
evaluates these integrals for every candidate center.  The kernels are
compiled with numba when available; setting FORGE_PURE_NUMPY=1 (or running
without numba) selects the pure NumPy implementation of the same algorithm.
benchmarks/bench_quadrature.py compares the two paths.

Estimates refine by midpoint bisection until the local value stabilizes
within `rel_tol` or the depth cap is hit; the returned error is the sum of
the last parent/child discrepancies.  Values feed threshold comparisons that
carry their own slack, so 1% relative accuracy is the default.
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLED = os.environ.get("FORGE_PURE_NUMPY", "").strip() not in ("", "0")

if not _DISABLED:
    try:
        from numba import njit
        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


def _segment_batch(segs, a, p, rel_tol, max_depth):
    """Sum of integrals of |y-a|^(-p) over the segments (m, 2, d)."""
    total = 0.0
    err = 0.0
    m = segs.shape[0]
    for s in range(m):
        p0 = segs[s, 0]
        p1 = segs[s, 1]
        seg_len = 0.0
        for i in range(p0.shape[0]):
            diff = p1[i] - p0[i]
            seg_len += diff * diff
        seg_len = math.sqrt(seg_len)
        if seg_len == 0.0:
            continue
        # stack of (t0, t1, depth)
        stack_t0 = np.empty(4 * max_depth + 8)
        stack_t1 = np.empty(4 * max_depth + 8)
        stack_dp = np.empty(4 * max_depth + 8, dtype=np.int64)
        top = 0
        stack_t0[0] = 0.0
        stack_t1[0] = 1.0
        stack_dp[0] = 0
        top = 1
        while top > 0:
            top -= 1
            t0 = stack_t0[top]
            t1 = stack_t1[top]
            depth = stack_dp[top]
            tm = 0.5 * (t0 + t1)
            f_mid = _seg_f(p0, p1, a, tm, p)
            parent = (t1 - t0) * seg_len * f_mid
            tl = 0.5 * (t0 + tm)
            tr = 0.5 * (tm + t1)
            kids = (tm - t0) * seg_len * _seg_f(p0, p1, a, tl, p) \
                + (t1 - tm) * seg_len * _seg_f(p0, p1, a, tr, p)
            disc = abs(parent - kids)
            if depth >= max_depth or disc <= rel_tol * (abs(kids) + 1e-300):
                total += kids
                err += disc
            else:
                stack_t0[top] = t0
                stack_t1[top] = tm
                stack_dp[top] = depth + 1
                top += 1
                stack_t0[top] = tm
                stack_t1[top] = t1
                stack_dp[top] = depth + 1
                top += 1
    return total, err


def _seg_f(p0, p1, a, t, p):
    d2 = 0.0
    for i in range(p0.shape[0]):
        y = p0[i] + t * (p1[i] - p0[i])
        diff = y - a[i]
        d2 += diff * diff
    if d2 <= 0.0:
        return math.inf
    if p == 0:
        return 1.0
    return d2 ** (-0.5 * p)


def _triangle_batch(tris, a, p, rel_tol, max_depth):
    """Sum of integrals of |y-a|^(-p) over the triangles (m, 3, d)."""
    total = 0.0
    err = 0.0
    m = tris.shape[0]
    d = tris.shape[2]
    cap = 4 * max_depth + 8
    stack = np.empty((cap, 3, d))
    depths = np.empty(cap, dtype=np.int64)
    for s in range(m):
        stack[0, 0] = tris[s, 0]
        stack[0, 1] = tris[s, 1]
        stack[0, 2] = tris[s, 2]
        depths[0] = 0
        top = 1
        while top > 0:
            top -= 1
            v0 = stack[top, 0].copy()
            v1 = stack[top, 1].copy()
            v2 = stack[top, 2].copy()
            depth = depths[top]
            area = _tri_area(v0, v1, v2)
            if area == 0.0:
                continue
            parent = area * _tri_f(v0, v1, v2, a, p, 1.0 / 3.0, 1.0 / 3.0)
            # split the longest edge at its midpoint
            e01 = _edge_len2(v0, v1)
            e12 = _edge_len2(v1, v2)
            e20 = _edge_len2(v2, v0)
            if e01 >= e12 and e01 >= e20:
                mid = 0.5 * (v0 + v1)
                ka0, ka1, ka2 = v0, mid, v2
                kb0, kb1, kb2 = mid, v1, v2
            elif e12 >= e20:
                mid = 0.5 * (v1 + v2)
                ka0, ka1, ka2 = v0, v1, mid
                kb0, kb1, kb2 = v0, mid, v2
            else:
                mid = 0.5 * (v2 + v0)
                ka0, ka1, ka2 = v0, v1, mid
                kb0, kb1, kb2 = mid, v1, v2
            kids = _tri_area(ka0, ka1, ka2) * _tri_f(ka0, ka1, ka2, a, p, 1.0 / 3.0, 1.0 / 3.0) \
                + _tri_area(kb0, kb1, kb2) * _tri_f(kb0, kb1, kb2, a, p, 1.0 / 3.0, 1.0 / 3.0)
            disc = abs(parent - kids)
            if depth >= max_depth or disc <= rel_tol * (abs(kids) + 1e-300):
                total += kids
                err += disc
            else:
                stack[top, 0] = ka0
                stack[top, 1] = ka1
                stack[top, 2] = ka2
                depths[top] = depth + 1
                top += 1
                stack[top, 0] = kb0
                stack[top, 1] = kb1
                stack[top, 2] = kb2
                depths[top] = depth + 1
                top += 1
    return total, err


def _tri_area(v0, v1, v2):
    # Gram determinant of the two edge vectors
    g00 = 0.0
    g01 = 0.0
    g11 = 0.0
    for i in range(v0.shape[0]):
        e1 = v1[i] - v0[i]
        e2 = v2[i] - v0[i]
        g00 += e1 * e1
        g01 += e1 * e2
        g11 += e2 * e2
    det = g00 * g11 - g01 * g01
    if det <= 0.0:
        return 0.0
    return 0.5 * math.sqrt(det)


def _tri_f(v0, v1, v2, a, p, b1, b2):
    d2 = 0.0
    for i in range(v0.shape[0]):
        y = v0[i] + b1 * (v1[i] - v0[i]) + b2 * (v2[i] - v0[i])
        diff = y - a[i]
        d2 += diff * diff
    if d2 <= 0.0:
        return math.inf
    if p == 0:
        return 1.0
    return d2 ** (-0.5 * p)


def _edge_len2(u, v):
    acc = 0.0
    for i in range(u.shape[0]):
        d = v[i] - u[i]
        acc += d * d
    return acc


if HAVE_NUMBA:
    _seg_f = njit(cache=True)(_seg_f)
    _tri_area = njit(cache=True)(_tri_area)
    _tri_f = njit(cache=True)(_tri_f)
    _edge_len2 = njit(cache=True)(_edge_len2)
    _segment_batch = njit(cache=True)(_segment_batch)
    _triangle_batch = njit(cache=True)(_triangle_batch)


def segment_singular_integral(segments, center, exponent,
                              rel_tol=0.01, max_depth=12):
    """Integral of |y - center|^(-exponent) summed over float segments."""
    segs = np.ascontiguousarray(np.asarray(segments, dtype=np.float64))
    if segs.size == 0:
        return 0.0, 0.0
    a = np.ascontiguousarray(np.asarray(center, dtype=np.float64))
    return _segment_batch(segs, a, float(exponent), float(rel_tol), int(max_depth))


def triangle_singular_integral(triangles, center, exponent,
                               rel_tol=0.01, max_depth=12):
    """Integral of |y - center|^(-exponent) summed over float triangles."""
    tris = np.ascontiguousarray(np.asarray(triangles, dtype=np.float64))
    if tris.size == 0:
        return 0.0, 0.0
    a = np.ascontiguousarray(np.asarray(center, dtype=np.float64))
    return _triangle_batch(tris, a, float(exponent), float(rel_tol), int(max_depth))


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
