"""Strong approximation pipeline: carry a chain onto nearby polyhedral data
with certified h-mass control.

Stages on polyhedral input:
  A. tile each simplex in-plane with disjoint boxes holding all but a small
     fraction of its mass (the flat case needs no graph pushforward);
  B. around each tile, sweep a thin local box grid so crossing mass lands on
     the tile plane or the box boundary;
  C. cover the leftover set with a fine cubical grid and sweep it down to
     the k-skeleton, folding the (polyhedral) boundary homotopies into the
     output.

Every stage preserves the chain exactly: R = P + dV with a rationally zero
residual; the eta-budgets are certified from recomputed masses, retrying
with halved grid sides when a budget fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .canonical import canonicalize
from .chains import ConvexRegion, PolyhedralChain, Simplex, clip_chain
from .costs import CostFunction, validate_cost
from .deform import SkeletonCertificate, deform_region
from .errors import BudgetExceeded, ChainforgeError, TilingFailed
from .grid import Grid
from .linalg import (ZERO, coords_in_hull, dist2_simplex_simplex, gram_schmidt,
                     hull_key, lift_from_hull, vadd, vdot, vnorm2, vscale, vsub)
from .rng import mix
from .scalars import MassValue

SHRINK_GAP = Fraction(1, 16)   # relative gap between adjacent tiles
MIN_SIDE_FACTOR = Fraction(1, 10 ** 6)
MAX_RETRIES = 6


@dataclass
class Tile:
    """A k-dimensional box inside one simplex of the input chain."""
    term_index: int
    corner: tuple          # world point
    axes: tuple            # k world vectors spanning the tile
    normals: tuple         # n-k world vectors completing the frame
    diag2: Fraction        # squared diameter of the tile

    def vertices(self):
        k = len(self.axes)
        out = []
        for bits in product((0, 1), repeat=k):
            p = self.corner
            for b, ax in zip(bits, self.axes):
                if b:
                    p = vadd(p, ax)
            out.append(p)
        return out

    def triangles(self):
        """Simplices covering the tile, for exact distance queries."""
        verts = self.vertices()
        k = len(self.axes)
        if k == 1:
            return [(verts[0], verts[1])]
        return [(verts[0], verts[1], verts[3]), (verts[0], verts[3], verts[2])]

    def world_bbox(self, pad=ZERO):
        vs = self.vertices()
        n = len(self.corner)
        lo = tuple(min(v[i] for v in vs) - pad for i in range(n))
        hi = tuple(max(v[i] for v in vs) + pad for i in range(n))
        return lo, hi


@dataclass
class TilingResult:
    tiles: list
    untiled_mass: MassValue
    untiled_fraction: Fraction
    min_gap2: Fraction     # certified pairwise clearance between tiles/boundary


@dataclass
class ApproxResult:
    """Outcome of the strong approximation run."""
    P: PolyhedralChain
    V: PolyhedralChain
    eta_requested: Fraction
    eta_achieved_P: MassValue
    eta_achieved_V: MassValue
    support_inflation: float
    h_mass_input: MassValue
    h_mass_output: MassValue
    residual_is_zero: bool
    boundary_preserved: bool
    attempts: int
    stage_certificates: list = field(default_factory=list)

    def to_json(self):
        from .scalars import format_rational
        return {
            "eta_requested": format_rational(self.eta_requested),
            "eta_achieved_P": self.eta_achieved_P.to_json(),
            "eta_achieved_V": self.eta_achieved_V.to_json(),
            "support_inflation": self.support_inflation,
            "h_mass_input": self.h_mass_input.to_json(),
            "h_mass_output": self.h_mass_output.to_json(),
            "residual_is_zero": self.residual_is_zero,
            "boundary_preserved": self.boundary_preserved,
            "attempts": self.attempts,
            "stages": [c.to_json() if hasattr(c, "to_json") else c
                       for c in self.stage_certificates],
        }


def _simplex_halfplanes(s_verts):
    """Facet inequalities of a k-simplex in its own k coordinates."""
    k = len(s_verts) - 1
    out = []
    for i in range(k + 1):
        face = [s_verts[j] for j in range(k + 1) if j != i]
        if k == 1:
            normal = (Fraction(1),)
            base = face[0]
        else:
            e = vsub(face[1], face[0])
            normal = (-e[1], e[0])
            base = face[0]
        off = vdot(normal, base)
        side = vdot(normal, s_verts[i]) - off
        if side < 0:
            normal = tuple(-x for x in normal)
            off = -off
        out.append((normal, off))  # inside: normal . x >= off
    return out


def _snap(value: float, limit: int = 10 ** 9) -> Fraction:
    return Fraction(value).limit_denominator(limit)


def tile_simplices(chain: PolyhedralChain, eta_fraction: Fraction) -> TilingResult:
    """Tile each simplex in-plane with pairwise disjoint k-boxes.

    The boxes stay clear of the chain's boundary support (circumradius
    margin) and of every other term (fixed cross margin), and cover enough
    of each simplex that the untiled h-mass fraction is at most
    `eta_fraction` per term, certified by exact area accounting in the
    hull coordinates.  Flat input needs no pushforward here, so only the
    tiling and the untiled mass are produced.
    """
    eta_fraction = Fraction(eta_fraction)
    if not (0 < eta_fraction < 1):
        raise TilingFailed("eta_fraction must be in (0, 1)")
    work = chain
    k = work.dim
    n = work.ambient
    if k < 1:
        raise TilingFailed("tiling needs chain dimension >= 1")
    boundary = canonicalize(work.boundary())
    bd_simplices = [verts for verts, _m in boundary.term_items()]
    terms = work.term_items()

    tiles: list = []
    min_gap2 = None
    untiled_fraction = Fraction(0)
    worst_fraction = Fraction(0)

    for t_idx, (verts, _mult) in enumerate(terms):
        _dim, anchor, basis = hull_key(verts)
        orth = gram_schmidt(basis)
        scale2 = [vnorm2(u) for u in orth]
        s_verts = [tuple(coords_in_hull(v, anchor, orth)) for v in verts]
        halfplanes = _simplex_halfplanes(s_verts)
        s_lo = [min(p[i] for p in s_verts) for i in range(k)]
        s_hi = [max(p[i] for p in s_verts) for i in range(k)]
        diam2 = Simplex(k, n, verts).diameter2()
        diam = math.sqrt(float(diam2))
        others = [ov for j, (ov, _om) in enumerate(terms) if j != t_idx]
        term_bbox = _bbox_of(verts)

        side = diam / 2.0
        min_side = diam * float(MIN_SIDE_FACTOR)
        vol_s = _simplex_volume_s(s_verts)
        while side >= min_side:
            deltas = [_snap(side / math.sqrt(float(sc))) for sc in scale2]
            if any(d <= 0 for d in deltas):
                side /= 2.0
                continue
            # cross margin shrinks with the cell side so margins never block
            # the fraction target; tiles of distinct terms stay this far apart
            cross_margin = _snap(side / 16.0)
            cross_margin2 = cross_margin * cross_margin
            near_others = [ov for ov in others if _bbox_overlap(
                term_bbox, _bbox_of(ov, pad=cross_margin))]
            kept = []
            covered = Fraction(0)
            cell_diag2 = sum(d * d * sc for d, sc in zip(deltas, scale2))
            counts = [max(1, math.ceil((s_hi[i] - s_lo[i]) / deltas[i]))
                      for i in range(k)]
            for idx in product(*(range(c) for c in counts)):
                lo = [s_lo[i] + idx[i] * deltas[i] for i in range(k)]
                ctr = [lo[i] + deltas[i] / 2 for i in range(k)]
                shrink = [deltas[i] * (1 - SHRINK_GAP) for i in range(k)]
                corners = []
                ok = True
                for bits in product((0, 1), repeat=k):
                    c = tuple(ctr[i] + (Fraction(bits[i]) - Fraction(1, 2)) * shrink[i]
                              for i in range(k))
                    corners.append(c)
                    for normal, off in halfplanes:
                        if vdot(normal, c) < off:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                world_corner = lift_from_hull(corners[0], anchor, orth)
                axes = tuple(vscale(orth[i], shrink[i]) for i in range(k))
                tile = Tile(t_idx, world_corner, axes, (), cell_diag2)
                tri = tile.triangles()
                for bd in bd_simplices:
                    d2 = min(dist2_simplex_simplex(t, bd) for t in tri)
                    if d2 * 4 <= cell_diag2:
                        ok = False
                        break
                if ok:
                    for overts in near_others:
                        d2 = min(dist2_simplex_simplex(t, overts) for t in tri)
                        if d2 < cross_margin2:
                            ok = False
                            break
                if not ok:
                    continue
                kept.append(tile)
                covered += _prod(shrink)
            fraction = 1 - covered / vol_s
            if fraction <= eta_fraction:
                break
            side /= 2.0
        else:
            raise TilingFailed(
                f"cannot reach untiled fraction {eta_fraction} on term {t_idx}")

        worst_fraction = max(worst_fraction, fraction)
        gap_here = min((SHRINK_GAP * d) ** 2 * sc
                       for d, sc in zip(deltas, scale2))
        gap_here = min(gap_here, cross_margin2)
        min_gap2 = gap_here if min_gap2 is None else min(min_gap2, gap_here)
        normals = _complete_frame(orth, n)
        for tile in kept:
            tiles.append(Tile(tile.term_index, tile.corner, tile.axes,
                              normals, tile.diag2))

    # per-term fraction bound scales with any admissible cost, so the
    # remainder is reported in plain mass
    untiled = MassValue.zero()
    for verts, mult in terms:
        vol = Simplex(k, n, verts).volume()
        untiled = untiled + vol.scale(abs(mult))
    untiled = untiled.scale(worst_fraction)
    return TilingResult(tiles=tiles, untiled_mass=untiled,
                        untiled_fraction=worst_fraction,
                        min_gap2=min_gap2 if min_gap2 is not None else Fraction(1))


def _prod(vals):
    out = Fraction(1)
    for v in vals:
        out *= v
    return out


def _simplex_volume_s(s_verts):
    from .linalg import det
    base = s_verts[0]
    rows = [vsub(p, base) for p in s_verts[1:]]
    d = det(rows)
    k = len(rows)
    return abs(d) / math.factorial(k)


def _complete_frame(orth, n):
    std = [tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)]
    full = gram_schmidt(list(orth) + std)
    return tuple(full[len(orth):])


# -- the pipeline ------------------------------------------------------------


def _tile_box_grid(tile: Tile, subdivisions: int, half_thickness: float) -> Grid:
    """Local grid over the tile box: N cells along each tile axis, two cells
    across each normal direction so the tile plane is a grid plane."""
    n = len(tile.corner)
    cols = [vscale(ax, Fraction(1, subdivisions)) for ax in tile.axes]
    origin = tile.corner
    for w in tile.normals:
        tau_s = _snap(half_thickness / math.sqrt(float(vnorm2(w))))
        if tau_s <= 0:
            tau_s = Fraction(1, 10 ** 12)
        col = vscale(w, tau_s)
        cols.append(col)
        origin = vsub(origin, col)
    return Grid.make(origin, cols, 1)


def _box_region(grid: Grid, counts, inflate=0) -> ConvexRegion:
    hs = []
    for i in range(grid.n):
        a, b = grid.axis_plane(i, counts[i] + inflate)
        hs.append((a, b))
        a, b = grid.axis_plane(i, -inflate)
        hs.append((tuple(-x for x in a), -b))
    return ConvexRegion(hs)


def _box_facet_simplices(grid: Grid, counts):
    """Triangulated boundary facets of the lattice box [0,counts] (world)."""
    n = grid.n
    out = []
    for axis in range(n):
        for value in (0, counts[axis]):
            spans = [range(counts[i]) if i != axis else [value]
                     for i in range(n)]
            for base in product(*spans):
                corners = {}
                free = [i for i in range(n) if i != axis]
                for bits in product((0, 1), repeat=len(free)):
                    t = list(base)
                    for b, i in zip(bits, free):
                        t[i] += b
                    corners[bits] = grid.to_world([Fraction(x) for x in t])
                if len(free) == 1:
                    out.append((corners[(0,)], corners[(1,)]))
                elif len(free) == 2:
                    out.append((corners[(0, 0)], corners[(1, 0)], corners[(1, 1)]))
                    out.append((corners[(0, 0)], corners[(1, 1)], corners[(0, 1)]))
                else:
                    out.append((corners[()],))
    return out


def _interior_face_filter(counts):
    def ok(face):
        for i, b in enumerate(face.base):
            if i in face.axes:
                if not (0 <= b <= counts[i] - 1):
                    return False
            else:
                if not (1 <= b <= counts[i] - 1):
                    return False
        return True
    return ok


def _merge_bboxes(boxes):
    """Greedy union of overlapping axis boxes (coarse clustering)."""
    boxes = list(boxes)
    changed = True
    while changed:
        changed = False
        out = []
        while boxes:
            lo, hi = boxes.pop()
            i = 0
            while i < len(boxes):
                lo2, hi2 = boxes[i]
                if all(lo[d] <= hi2[d] and hi[d] >= lo2[d] for d in range(len(lo))):
                    lo = tuple(min(a, b) for a, b in zip(lo, lo2))
                    hi = tuple(max(a, b) for a, b in zip(hi, hi2))
                    boxes.pop(i)
                    changed = True
                else:
                    i += 1
            out.append((lo, hi))
        boxes = out
    return boxes


def _bbox_of(verts, pad=ZERO):
    n = len(verts[0])
    lo = tuple(min(v[i] for v in verts) - pad for i in range(n))
    hi = tuple(max(v[i] for v in verts) + pad for i in range(n))
    return lo, hi


def _bbox_overlap(b0, b1):
    return all(b0[0][i] <= b1[1][i] and b0[1][i] >= b1[0][i]
               for i in range(len(b0[0])))


def _dist2_box_to_simplices(grid_unit_cell, cell_base, simplices):
    """Exact squared distance from a lattice cell (axis box) to simplices."""
    eps = grid_unit_cell
    n = len(cell_base)
    corner = tuple(Fraction(b) * eps for b in cell_base)
    corners = []
    for bits in product((0, 1), repeat=n):
        corners.append(tuple(corner[i] + bits[i] * eps for i in range(n)))
    if n == 2:
        cell_simps = [(corners[0], corners[1], corners[3]),
                      (corners[0], corners[3], corners[2])]
    elif n == 3:
        cell_simps = _box_tets(corners)
    else:
        cell_simps = [tuple(corners)]
    best = None
    for cs in cell_simps:
        for s in simplices:
            d2 = dist2_simplex_simplex(cs, s)
            if best is None or d2 < best:
                best = d2
                if best == 0:
                    return best
    return best


def _box_tets(c):
    # Kuhn decomposition of a cube given its 8 corners indexed by bits (z,y,x)
    idx = lambda x, y, z: c[x * 4 + y * 2 + z]
    paths = [((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)),
             ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 1)),
             ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 1, 1)),
             ((0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 1, 1)),
             ((0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)),
             ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1))]
    return [tuple(idx(*p) for p in path) for path in paths]


def approximate(chain: PolyhedralChain, eta, cost: CostFunction,
                rng_seed: int, kappa=None) -> ApproxResult:
    """Decompose chain = P + dV with certified h-mass control.

    Runs the three-stage pipeline; on a failed eta-budget the grid sides are
    halved and the run retried (up to six times).  All output inequalities
    are recomputed from the assembled chains, never trusted from the run.
    """
    eta = Fraction(eta)
    if eta <= 0:
        raise BudgetExceeded("eta must be positive")
    work = canonicalize(chain)
    k = work.dim
    n = work.ambient
    if work.is_zero:
        return ApproxResult(work, PolyhedralChain.zero(k + 1, n), eta,
                            MassValue.zero(), MassValue.zero(), 0.0,
                            MassValue.zero(), MassValue.zero(), True, True, 0)

    theta_max = max(abs(m) for _v, m in work.term_items())
    report = validate_cost(cost, 0, theta_max + 1, 32)
    if not (report.base_ok and report.linear_lower_ok):
        raise ChainforgeError(
            "cost must satisfy the base conditions and a linear lower bound "
            f"on [0, {theta_max + 1}]: {report.failures}")

    mh_r = work.mass_report(cost, canonical=True).h_mass
    eta_f = float(eta)

    last_error = None
    for attempt in range(MAX_RETRIES):
        try:
            result = _pipeline_once(work, eta, cost, rng_seed, attempt, mh_r)
        except (TilingFailed, BudgetExceeded) as exc:
            last_error = exc
            continue
        if (result.eta_achieved_P.upper() < eta_f
                and result.eta_achieved_V.upper() < eta_f
                and result.support_inflation < eta_f):
            result.attempts = attempt + 1
            return result
        last_error = BudgetExceeded(
            f"attempt {attempt}: P excess {result.eta_achieved_P.upper():.3g}, "
            f"V mass {result.eta_achieved_V.upper():.3g} vs eta {eta_f:.3g}",
            certificate=result)
    raise last_error if last_error is not None else BudgetExceeded("pipeline failed")


def _pipeline_once(work, eta, cost, rng_seed, attempt, mh_r):
    k = work.dim
    n = work.ambient
    eta_f = float(eta)
    stage_certs = []

    # Stage A: tiling with per-term untiled fraction eta/8 / M_h(R)
    frac_target = min(Fraction(1, 4),
                      eta / 8 / _ceil_fraction(mh_r.upper())) / (2 ** attempt)
    tiling = tile_simplices(work, frac_target)
    stage_certs.append({"stage": "tiling", "tiles": len(tiling.tiles),
                        "untiled_fraction": float(tiling.untiled_fraction),
                        "untiled_mass": tiling.untiled_mass.to_json()})

    cur = work
    v_total = PolyhedralChain.zero(k + 1, n)
    u_total = PolyhedralChain.zero(k, n)

    # Stage B: local box sweeps around each tile
    gap = math.sqrt(float(tiling.min_gap2))
    tau = gap / (4.0 * math.sqrt(n)) / (2 ** attempt)
    subdivisions = 4 * (2 ** attempt)
    box_grids = []
    for t_idx, tile in enumerate(tiling.tiles):
        grid_b = _tile_box_grid(tile, subdivisions, tau)
        counts = [subdivisions] * k + [2] * (n - k)
        box_grids.append((grid_b, counts))
        region = _box_region(grid_b, counts)
        has_mass = not clip_chain(cur, region, mode="closed")[0].is_zero
        if not has_mass:
            continue
        p_c, u_c, v_c, cert = deform_region(
            cur, grid_b, cost, mix(rng_seed, "tilebox", t_idx),
            face_filter=_interior_face_filter(counts),
            active_regions=[_box_region(grid_b, counts, inflate=1)],
            verify=False)
        if not u_c.is_zero:
            raise BudgetExceeded("boundary mass inside a tile box")
        cur = p_c
        v_total = v_total + v_c
        if cert.faces_processed:
            stage_certs.append(cert)

    mh_after_b = cur.mass_report(cost, canonical=True).h_mass
    if not mh_after_b.value <= mh_r.value + eta_f / 4.0 + mh_after_b.err + mh_r.err:
        raise BudgetExceeded("near-tile sweep exceeded its mass budget")

    # Stage C: cleanup grid around everything off the tile interiors
    z_chain = cur
    for grid_b, counts in box_grids:
        region = _box_region(grid_b, counts)
        _inside, z_chain = clip_chain(z_chain, region, mode="open")
    z_simplices = [verts for verts, _m in z_chain.term_items()]
    for grid_b, counts in box_grids:
        z_simplices.extend(_box_facet_simplices(grid_b, counts))

    tau_f = max(tau, 1e-12)
    eps0 = tau_f / (2.0 * math.sqrt(n))
    m0 = max(1, math.ceil(-math.log2(max(eps0, 1e-15))))
    budget = eta_f / 8.0
    chosen = None
    for extra in range(20):
        eps = Fraction(1, 2 ** (m0 + extra))
        grid_c = Grid.unit(n, side=eps)
        touched, active_regions = _stage_c_mass(
            cur, grid_c, eps, z_simplices, cost, n)
        if touched.value <= budget or touched.value <= touched.err:
            chosen = (eps, grid_c, active_regions)
            break
    if chosen is None:
        raise BudgetExceeded("cleanup grid could not meet its mass budget")
    eps, grid_c, active_regions = chosen

    w_cache: dict = {}
    nz_eps2 = Fraction(n) * eps * eps

    def cell_in_w(base):
        got = w_cache.get(base)
        if got is None:
            d2 = _dist2_cell_to_z(base, eps, z_simplices)
            got = d2 is not None and d2 <= nz_eps2
            w_cache[base] = got
        return got

    def face_ok(face):
        free = set(face.axes)
        fixed = [i for i in range(n) if i not in free]
        for offsets in product((-1, 0), repeat=len(fixed)):
            cell = list(face.base)
            for off, i in zip(offsets, fixed):
                cell[i] += off
            if not cell_in_w(tuple(cell)):
                return False
        return True

    p_c, u_c, v_c, cert_c = deform_region(
        cur, grid_c, cost, mix(rng_seed, "cleanup"),
        face_filter=face_ok, active_regions=active_regions, verify=False)
    stage_certs.append(cert_c)
    cur = p_c
    u_total = u_total + u_c
    v_total = v_total + v_c

    # fold the polyhedral boundary homotopies into the output
    p_final = canonicalize(cur + u_total)
    v_final = canonicalize(v_total, allow_partial=(k + 1 > 2))

    residual = canonicalize(work - p_final - v_final.boundary())
    if not residual.is_zero:
        raise ChainforgeError("pipeline homotopy identity failed")
    boundary_ok = canonicalize(p_final.boundary() - work.boundary()).is_zero
    if not boundary_ok:
        raise ChainforgeError("pipeline did not preserve the boundary")

    mh_p = p_final.mass_report(cost, canonical=True).h_mass
    mh_v = (v_final.mass_report(cost, canonical=True).h_mass
            if k + 1 <= 2 else v_final.mass_upper_bound(cost))
    inflation = _support_inflation(v_final, work)
    return ApproxResult(
        P=p_final, V=v_final, eta_requested=eta,
        eta_achieved_P=mh_p - mh_r, eta_achieved_V=mh_v,
        support_inflation=inflation,
        h_mass_input=mh_r, h_mass_output=mh_p,
        residual_is_zero=True, boundary_preserved=boundary_ok,
        attempts=attempt + 1, stage_certificates=stage_certs)


def _ceil_fraction(x: float) -> Fraction:
    return max(Fraction(x).limit_denominator(10 ** 6), Fraction(1, 10 ** 6))


def _stage_c_mass(cur, grid_c, eps, z_simplices, cost, n):
    """Mass the cleanup sweep would touch, plus clip regions covering it."""
    pad = 4 * Fraction(n).limit_denominator() * eps
    z_boxes = _merge_bboxes([_bbox_of(s, pad) for s in z_simplices])
    regions = [ConvexRegion.box(lo, hi) for lo, hi in z_boxes]
    touched = MassValue.zero()
    rest = cur
    from .grid import split_by_grid
    for region in regions:
        inside, rest = clip_chain(rest, region, mode="closed")
        if inside.is_zero:
            continue
        nz_eps2 = Fraction(n) * eps * eps
        for verts, mult, face in split_by_grid(inside, grid_c):
            ok = True
            free = set(face.axes)
            fixed = [i for i in range(n) if i not in free]
            for offsets in product((-1, 0), repeat=len(fixed)):
                cell = list(face.base)
                for off, i in zip(offsets, fixed):
                    cell[i] += off
                d2 = _dist2_cell_to_z(tuple(cell), eps, z_simplices)
                if d2 is None or d2 > nz_eps2:
                    ok = False
                    break
            if ok:
                vol = Simplex(cur.dim, cur.ambient, verts).volume()
                touched = touched + cost(mult) * vol
        if rest.is_zero:
            break
    return touched, regions


def _dist2_cell_to_z(cell_base, eps, z_simplices):
    n = len(cell_base)
    lo = tuple(Fraction(b) * eps for b in cell_base)
    hi = tuple(Fraction(b + 1) * eps for b in cell_base)
    best = None
    for s in z_simplices:
        sb = _bbox_of(s)
        # quick reject: bbox gap already exceeds any candidate
        gap2 = ZERO
        for i in range(n):
            if sb[0][i] > hi[i]:
                gap2 += (sb[0][i] - hi[i]) ** 2
            elif sb[1][i] < lo[i]:
                gap2 += (lo[i] - sb[1][i]) ** 2
        if best is not None and gap2 >= best:
            continue
        d2 = _dist2_box_corners(lo, hi, s)
        if best is None or d2 < best:
            best = d2
            if best == 0:
                break
    return best


def _dist2_box_corners(lo, hi, simplex):
    n = len(lo)
    corners = []
    for bits in product((0, 1), repeat=n):
        corners.append(tuple(hi[i] if bits[i] else lo[i] for i in range(n)))
    if n == 2:
        cell_simps = [(corners[0], corners[1], corners[3]),
                      (corners[0], corners[3], corners[2])]
    elif n == 3:
        cell_simps = _box_tets(corners)
    else:
        cell_simps = [tuple(corners)]
    best = None
    for cs in cell_simps:
        d2 = dist2_simplex_simplex(cs, simplex)
        if best is None or d2 < best:
            best = d2
            if best == 0:
                break
    return best


def _support_inflation(v_chain: PolyhedralChain, base: PolyhedralChain) -> float:
    """Certified bound on sup_{x in supp V} dist(x, supp base)."""
    if v_chain.is_zero:
        return 0.0
    base_terms = [verts for verts, _m in base.term_items()]
    base_boxes = [_bbox_of(v) for v in base_terms]
    worst = 0.0
    for verts, _mult in v_chain.term_items():
        diam2 = Simplex(v_chain.dim, v_chain.ambient, verts).diameter2()
        best = None
        vb = _bbox_of(verts)
        for bverts, bbox in zip(base_terms, base_boxes):
            if best is not None:
                gap2 = ZERO
                for i in range(len(vb[0])):
                    if bbox[0][i] > vb[1][i]:
                        gap2 += (bbox[0][i] - vb[1][i]) ** 2
                    elif bbox[1][i] < vb[0][i]:
                        gap2 += (vb[0][i] - bbox[1][i]) ** 2
                if gap2 >= best:
                    continue
            d2 = min(dist2_simplex_simplex((v,), bverts) for v in verts)
            if best is None or d2 < best:
                best = d2
        bound = math.sqrt(float(best)) * (1 + 1e-12) + math.sqrt(float(diam2)) * (1 + 1e-12)
        worst = max(worst, bound)
    return worst
