"""Face-local deformation of chains onto lower skeleta.

The elementary move deforms the part of a chain inside one relatively open
grid face Q: pick a projection center a in the concentric half-face whose
singular integrals pass a Markov-style threshold test, split the Q-part by
the fan of cones from a over the facets of Q, push each cone piece through
its central projection (a projective map), and fill the homotopy with prism
cells.  The output satisfies T = T~ + U + dV exactly in rational arithmetic,
with U, V supported in the closed face and T~ carrying no mass in Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .canonical import canonicalize
from .chains import (ConvexRegion, PolyhedralChain, Simplex, clip_chain)
from .costs import CostFunction
from .errors import ChainforgeError, InvalidFace, SelectionFailed
from .grid import FaceId, Grid, face_region, locate_face, omega_faces, split_by_grid
from .linalg import (ZERO, dist2_point_affine, dist2_point_simplex, inverse,
                     vadd, vdot, vnorm2, vscale, vsub)
from .projective import PiecewiseProjectiveMap, ProjectivePiece, pushforward_detailed
from .quadrature import segment_singular_integral, triangle_singular_integral
from .rng import Rng, face_seed
from .scalars import MassValue

KAPPA_DEFAULT = Fraction(4)
N_MAX_SAMPLES = 1000
CLEARANCE_DIVISOR = 1000
THRESHOLD_SLACK = 1.02  # absorbs the 1% quadrature tolerance


@dataclass
class CenterCertificate:
    """A selected projection center with its threshold evidence."""
    face: FaceId
    a_lattice: tuple
    a_world: tuple
    i_value: float
    i_err: float
    i_threshold: float
    j_value: float
    j_err: float
    j_threshold: float
    clearance2: Fraction | None
    attempts: int
    kappa: Fraction

    def to_json(self):
        from .scalars import format_rational
        return {
            "face": self.face.pretty(),
            "a": [format_rational(x) for x in self.a_world],
            "I_h": self.i_value, "I_err": self.i_err, "I_threshold": self.i_threshold,
            "J_h": self.j_value, "J_err": self.j_err, "J_threshold": self.j_threshold,
            "clearance2": (format_rational(self.clearance2)
                           if self.clearance2 is not None else None),
            "attempts": self.attempts,
            "kappa": format_rational(self.kappa),
        }


@dataclass
class DeformationCertificate:
    """Measured quantities backing the mass estimates of one local move."""
    face: FaceId
    h_mass_before: MassValue | None
    h_mass_after: MassValue | None
    h_mass_restricted: MassValue
    h_mass_boundary_restricted: MassValue
    h_mass_change: MassValue
    h_mass_boundary_change: MassValue
    h_mass_U: MassValue
    h_mass_V: MassValue
    ratio_T: float
    ratio_V: float
    ratio_U: float
    ratio_boundary: float
    residual_is_zero: bool
    support_checks: dict
    center: CenterCertificate | None

    def ratios(self):
        return {"ratio_T": self.ratio_T, "ratio_V": self.ratio_V,
                "ratio_U": self.ratio_U, "ratio_boundary": self.ratio_boundary}

    def to_json(self):
        out = {
            "face": self.face.pretty(),
            "h_mass_restricted": self.h_mass_restricted.to_json(),
            "h_mass_boundary_restricted": self.h_mass_boundary_restricted.to_json(),
            "h_mass_change": self.h_mass_change.to_json(),
            "h_mass_boundary_change": self.h_mass_boundary_change.to_json(),
            "h_mass_U": self.h_mass_U.to_json(),
            "h_mass_V": self.h_mass_V.to_json(),
            "residual_is_zero": self.residual_is_zero,
            "support_checks": self.support_checks,
        }
        out.update(self.ratios())
        if self.h_mass_before is not None:
            out["h_mass_before"] = self.h_mass_before.to_json()
        if self.h_mass_after is not None:
            out["h_mass_after"] = self.h_mass_after.to_json()
        if self.center is not None:
            out["center"] = self.center.to_json()
        return out


def _sphere_area(j: int) -> float:
    """Surface measure of the unit (j-1)-sphere."""
    return 2.0 * math.pi ** (j / 2.0) / math.gamma(j / 2.0)


def _face_pieces(chain: PolyhedralChain, grid: Grid, face: FaceId):
    """Clip the chain to the closed face and separate open-face pieces.

    Returns (in_open_face, rest) with in_open_face + rest == chain as
    currents; the split is the exact partition produced by clipping.
    """
    region = face_region(grid, face)
    inside, outside = clip_chain(chain, region, mode="closed")
    q_terms = []
    rest_terms = list(outside.term_items())
    for verts, mult in inside.term_items():
        simp = Simplex(chain.dim, chain.ambient, verts)
        if locate_face(grid, simp.centroid()) == face:
            q_terms.append((verts, mult))
        else:
            rest_terms.append((verts, mult))
    part_q = PolyhedralChain.from_terms(chain.dim, chain.ambient, q_terms)
    rest = PolyhedralChain.from_terms(chain.dim, chain.ambient, rest_terms)
    return part_q, rest


def check_support_condition(chain: PolyhedralChain, grid: Grid, face: FaceId):
    """Raise InvalidFace if the chain has mass in an open coface of `face`.

    Coface closures live inside the face box inflated by one lattice unit,
    so the check clips to that neighborhood only.
    """
    lo, hi = face.lattice_bounds()
    nb_lo = [x - 1 for x in lo]
    nb_hi = [x + 1 for x in hi]
    hs = []
    for i in range(grid.n):
        a, b = grid.axis_plane(i, nb_hi[i])
        hs.append((a, b))
        a, b = grid.axis_plane(i, nb_lo[i])
        hs.append((tuple(-x for x in a), -b))
    near, _far = clip_chain(chain, ConvexRegion(hs), mode="closed")
    if near.is_zero:
        return
    omega = set(omega_faces(face, grid.n))
    for verts, _mult, located in split_by_grid(near, grid):
        if located in omega:
            raise InvalidFace(
                f"chain has mass in coface {located.pretty()} of {face.pretty()}")


# -- center selection --------------------------------------------------------


def _piece_float_data(chain: PolyhedralChain, cost: CostFunction):
    """Float geometry + h(theta) weights for the quadrature kernels."""
    data = []
    for verts, mult in chain.term_items():
        w = cost(mult).value
        data.append(([tuple(float(x) for x in v) for v in verts], w))
    return data


def _weighted_integral(data, dim: int, a_world, exponent: int):
    if not data:
        return 0.0, 0.0
    if dim == 0:
        # counting measure; the singular factor is |y-a|^0 = 1 here
        return sum(w for _verts, w in data), 0.0
    a = [float(x) for x in a_world]
    total = 0.0
    err = 0.0
    for verts, w in data:
        if dim == 1:
            val, e = segment_singular_integral([verts], a, exponent)
        elif dim == 2:
            val, e = triangle_singular_integral([verts], a, exponent)
        else:
            raise ChainforgeError(f"no quadrature kernel for dimension {dim}")
        total += w * val
        err += abs(w) * e
    return total, err


def select_center(chain: PolyhedralChain, boundary: PolyhedralChain,
                  face: FaceId, grid: Grid, cost: CostFunction,
                  rng_seed: int, kappa: Fraction = KAPPA_DEFAULT,
                  n_max: int = N_MAX_SAMPLES) -> CenterCertificate:
    """Sample a projection center in the concentric half-face.

    Acceptance: both singular integrals below kappa times their averaged
    bounds (Markov: each draw succeeds with probability > 1 - 2/kappa), and
    exact clearance of side/1000 from the restricted supports and from the
    affine hulls of the restricted pieces.
    """
    if kappa <= 2:
        raise SelectionFailed("kappa must exceed 2 for a positive success rate")
    part_q, _rest = _face_pieces(chain, grid, face)
    bd_q, _bd_rest = _face_pieces(boundary, grid, face)
    check_support_condition(chain, grid, face)
    return _select_center_inner(part_q, bd_q, face, grid, cost,
                                Rng(rng_seed), kappa, n_max)


def _select_center_inner(part_q, bd_q, face, grid, cost, rng, kappa, n_max):
    k = part_q.dim
    j = face.dim
    if not (k < j):
        raise InvalidFace(f"face dim {j} must exceed chain dim {k}")

    lens = [MassValue.from_sqrt(grid.axis_len2(i)).value for i in face.axes]
    len_max = max(lens)
    half_vol = 1.0
    for l in lens:
        half_vol *= l / 2.0
    mh_t = part_q.mass_report(cost, canonical=True).h_mass
    mh_b = bd_q.mass_report(cost, canonical=True).h_mass

    c_int_i = _sphere_area(j) * (2.0 * math.sqrt(j) * len_max) ** (j - k) / (j - k)
    thr_i = float(kappa) * c_int_i / half_vol * mh_t.value
    c_int_j = _sphere_area(j) * (2.0 * math.sqrt(j) * len_max) ** (j - k + 1) / (j - k + 1)
    thr_j = float(kappa) * c_int_j / half_vol * mh_b.value

    rho2 = grid.min_axis_len2() / (CLEARANCE_DIVISOR ** 2)
    data_t = _piece_float_data(part_q, cost)
    data_b = _piece_float_data(bd_q, cost)
    hull_data = []
    for verts, _mult in part_q.term_items():
        base = verts[0]
        basis = [vsub(v, base) for v in verts[1:]]
        hull_data.append((verts, base, basis))
    bd_simplices = [verts for verts, _m in bd_q.term_items()]

    attempts = 0
    while attempts < n_max:
        attempts += 1
        a_lat = []
        for i in range(grid.n):
            if i in face.axes:
                a_lat.append(Fraction(face.base[i]) + Fraction(1, 4) + rng.unit() / 2)
            else:
                a_lat.append(Fraction(face.base[i]))
        a_lat = tuple(a_lat)
        a_world = grid.to_world(a_lat)

        clearance2 = None
        ok = True
        for verts, base, basis in hull_data:
            d2 = dist2_point_simplex(a_world, verts)
            if basis:
                d2h = dist2_point_affine(a_world, base, basis)
                d2 = min(d2, d2h)
            clearance2 = d2 if clearance2 is None else min(clearance2, d2)
            if d2 < rho2:
                ok = False
                break
        if ok:
            for verts in bd_simplices:
                d2 = dist2_point_simplex(a_world, verts)
                clearance2 = d2 if clearance2 is None else min(clearance2, d2)
                if d2 < rho2:
                    ok = False
                    break
        if not ok:
            continue

        i_val, i_err = _weighted_integral(data_t, k, a_world, k)
        if i_val > thr_i * THRESHOLD_SLACK + 1e-12:
            continue
        j_val, j_err = _weighted_integral(data_b, k - 1, a_world, k - 1)
        if j_val > thr_j * THRESHOLD_SLACK + 1e-12:
            continue
        return CenterCertificate(
            face=face, a_lattice=a_lat, a_world=a_world,
            i_value=i_val, i_err=i_err, i_threshold=thr_i,
            j_value=j_val, j_err=j_err, j_threshold=thr_j,
            clearance2=clearance2, attempts=attempts, kappa=kappa)
    raise SelectionFailed(
        f"no admissible center in {n_max} samples at face {face.pretty()}")


# -- the projection fan ------------------------------------------------------


def _lattice_halfspace_to_world(grid: Grid, alpha, beta):
    """Convert sum(alpha_i * t_i) <= beta into world coordinates."""
    n = grid.n
    normal = tuple(ZERO for _ in range(n))
    for i in range(n):
        if alpha[i] == 0:
            continue
        scale = alpha[i] / (vnorm2(grid.frame[i]) * grid.side)
        normal = vadd(normal, vscale(grid.frame[i], scale))
    return normal, Fraction(beta) + vdot(normal, grid.origin)


def _lattice_affine_matrices(grid: Grid):
    """Homogeneous matrices E (lattice -> world) and E^-1."""
    n = grid.n
    e_rows = []
    for i in range(n):
        row = [grid.side * grid.frame[m][i] for m in range(n)]
        row.append(grid.origin[i])
        e_rows.append(tuple(row))
    e_rows.append(tuple([ZERO] * n + [Fraction(1)]))
    inv_rows = []
    for i in range(n):
        nu = vnorm2(grid.frame[i]) * grid.side
        row = [grid.frame[i][m] / nu for m in range(n)]
        row.append(-vdot(grid.frame[i], grid.origin) / nu)
        inv_rows.append(tuple(row))
    inv_rows.append(tuple([ZERO] * n + [Fraction(1)]))
    return tuple(e_rows), tuple(inv_rows)


def _mat_mul3(a, b):
    from .linalg import mat_mul
    return mat_mul(a, b)


def build_projection_fan(grid: Grid, face: FaceId, a_lattice) -> PiecewiseProjectiveMap:
    """Piecewise projective map: central projection from `a` onto the facets
    of the face, identity elsewhere.

    One piece per facet (free axis d, lattice value c in {base_d, base_d+1}):
    the cone from a over that facet, clipped to the closed face.  Facets are
    ordered by (d, c), which settles measure-zero assignment questions.
    """
    n = grid.n
    lo, hi = face.lattice_bounds()
    e_mat, e_inv = _lattice_affine_matrices(grid)
    pieces = []
    for d in face.axes:
        for c in (lo[d], hi[d]):
            a_d = a_lattice[d]
            sigma = 1 if c > a_d else -1
            # region: cone over the facet, inside the closed face box
            halfspaces = []
            alpha = [ZERO] * n
            alpha[d] = Fraction(-sigma)
            halfspaces.append(_lattice_halfspace_to_world(grid, alpha, -sigma * a_d))
            for dp in face.axes:
                if dp == d:
                    continue
                # lower: sigma[(a_dp - lo_dp)(t_d - a_d) + (c - a_d)(t_dp - a_dp)] >= 0
                for bound, flip in ((lo[dp], 1), (hi[dp], -1)):
                    coef_d = Fraction(sigma * flip) * (a_lattice[dp] - bound)
                    coef_dp = Fraction(sigma * flip) * (c - a_d)
                    beta = coef_d * a_d + coef_dp * a_lattice[dp]
                    alpha = [ZERO] * n
                    alpha[d] = -coef_d
                    alpha[dp] = -coef_dp
                    halfspaces.append(
                        _lattice_halfspace_to_world(grid, alpha, -beta))
            for i in range(n):
                alpha = [ZERO] * n
                alpha[i] = Fraction(1)
                halfspaces.append(_lattice_halfspace_to_world(grid, alpha, hi[i]))
                alpha = [ZERO] * n
                alpha[i] = Fraction(-1)
                halfspaces.append(_lattice_halfspace_to_world(grid, alpha, -lo[i]))
            region = ConvexRegion(halfspaces)

            # homogeneous matrix in lattice coordinates, denominator
            # D(t) = sigma * (t_d - a_d) > 0 on the cone interior
            rows = []
            for i in range(n):
                row = [ZERO] * (n + 1)
                if i in face.axes:
                    row[i] = Fraction(sigma) * (c - a_d)
                    row[d] += Fraction(sigma) * a_lattice[i]
                    row[n] = -Fraction(sigma) * a_lattice[i] * c
                else:
                    row[d] = Fraction(sigma) * a_lattice[i]
                    row[n] = -Fraction(sigma) * a_lattice[i] * a_d
                rows.append(tuple(row))
            bottom = [ZERO] * (n + 1)
            bottom[d] = Fraction(sigma)
            bottom[n] = -Fraction(sigma) * a_d
            rows.append(tuple(bottom))
            world_rows = _mat_mul3(_mat_mul3(e_mat, tuple(rows)), e_inv)
            pieces.append(ProjectivePiece(region, world_rows))
    return PiecewiseProjectiveMap(n, tuple(pieces))


# -- prisms ------------------------------------------------------------------


def homotopy_prism(matches, dim: int, ambient: int) -> PolyhedralChain:
    """The swept chain z#((0,1) x pieces) for the straight-line homotopy.

    Each mapped fragment (s_0..s_k) -> (w_0..w_k) contributes the staircase
    cells (s_0..s_i, w_i..w_k) with sign (-1)^i; degenerate cells drop out
    in chain assembly.
    """
    terms = []
    for src, mult, img, piece in matches:
        if piece is None:
            continue  # identity fragment sweeps nothing
        kk = len(src) - 1
        for i in range(kk + 1):
            cell = src[:i + 1] + img[i:]
            sign = 1 if i % 2 == 0 else -1
            terms.append((cell, sign * mult))
    return PolyhedralChain.from_terms(dim + 1, ambient, terms)


# -- the local deformation ---------------------------------------------------


def local_deform(chain: PolyhedralChain, grid: Grid, face: FaceId,
                 cost: CostFunction, rng_seed: int,
                 kappa: Fraction = KAPPA_DEFAULT,
                 assume_canonical: bool = False,
                 check_support: bool = True,
                 with_global_masses: bool = True):
    """Deform the chain off the open face Q.

    Returns (T~, U, V, DeformationCertificate) with chain = T~ + U + dV
    exactly, supp U u supp V inside the closed face, and T~ carrying no mass
    in the open face.
    """
    work = chain if assume_canonical else canonicalize(chain)
    if check_support:
        check_support_condition(work, grid, face)
    boundary = canonicalize(work.boundary())
    part_q, rest = _face_pieces(work, grid, face)
    bd_q, _bd_rest = _face_pieces(boundary, grid, face)

    k = work.dim
    n = work.ambient
    zero_u = PolyhedralChain.zero(k, n)
    zero_v = PolyhedralChain.zero(k + 1, n)

    if part_q.is_zero and bd_q.is_zero:
        cert = _certificate(face, work, work, part_q, bd_q,
                            PolyhedralChain.zero(k, n), zero_u, zero_v,
                            PolyhedralChain.zero(k - 1, n),
                            grid, cost, None, with_global_masses, True)
        return work, zero_u, zero_v, cert

    center = _select_center_inner(part_q, bd_q, face, grid, cost,
                                  Rng(rng_seed), kappa, N_MAX_SAMPLES)
    fan = build_projection_fan(grid, face, center.a_lattice)

    image, matches = pushforward_detailed(part_q, fan, check_continuity=True)
    bd_image, bd_matches = pushforward_detailed(bd_q, fan, check_continuity=True)

    v_chain = -homotopy_prism(matches, k, n)
    u_chain = -homotopy_prism(bd_matches, k - 1, n)

    tilde = canonicalize(rest + image)
    u_canon = canonicalize(u_chain)
    v_canon = canonicalize(v_chain, allow_partial=(k + 1 > 2))

    residual = canonicalize(part_q - image - u_canon - v_canon.boundary())
    if not residual.is_zero:
        raise ChainforgeError(
            f"homotopy identity failed at face {face.pretty()}")

    change = canonicalize(image - part_q)
    bd_change = canonicalize(bd_image - bd_q)
    cert = _certificate(face, work, tilde, part_q, bd_q, change, u_canon,
                        v_canon, bd_change, grid, cost, center,
                        with_global_masses, True)
    return tilde, u_canon, v_canon, cert


def _ratio(numer: MassValue, denom: MassValue, scale: float = 1.0) -> float:
    if denom.value <= denom.err:
        return 0.0
    return numer.value / (denom.value * scale)


def _certificate(face, before, after, part_q, bd_q, change, u_chain, v_chain,
                 bd_change, grid, cost, center, with_global, residual_zero):
    mh_q = part_q.mass_report(cost, canonical=True).h_mass
    mh_bq = bd_q.mass_report(cost, canonical=True).h_mass
    mh_change = change.mass_report(cost, canonical=True).h_mass
    mh_bd_change = bd_change.mass_report(cost, canonical=True).h_mass
    mh_u = u_chain.mass_report(cost, canonical=True).h_mass
    if v_chain.dim <= 2:
        mh_v = v_chain.mass_report(cost, canonical=True).h_mass
    else:
        mh_v = v_chain.mass_upper_bound(cost)
    delta = max(MassValue.from_sqrt(grid.axis_len2(i)).value
                for i in (face.axes or range(grid.n)))
    support_checks = {
        "U_in_face_closure": _inside_face_closure(u_chain, grid, face),
        "V_in_face_closure": _inside_face_closure(v_chain, grid, face),
        "no_mass_in_open_face": _no_open_face_mass(after, grid, face),
    }
    mh_before = before.mass_report(cost, canonical=True).h_mass if with_global else None
    mh_after = after.mass_report(cost, canonical=True).h_mass if with_global else None
    return DeformationCertificate(
        face=face,
        h_mass_before=mh_before,
        h_mass_after=mh_after,
        h_mass_restricted=mh_q,
        h_mass_boundary_restricted=mh_bq,
        h_mass_change=mh_change,
        h_mass_boundary_change=mh_bd_change,
        h_mass_U=mh_u,
        h_mass_V=mh_v,
        ratio_T=_ratio(mh_change, mh_q),
        ratio_V=_ratio(mh_v, mh_q, scale=delta),
        ratio_U=_ratio(mh_u, mh_bq, scale=delta),
        ratio_boundary=_ratio(mh_bd_change, mh_bq),
        residual_is_zero=residual_zero,
        support_checks=support_checks,
        center=center,
    )


def _inside_face_closure(chain: PolyhedralChain, grid: Grid, face: FaceId) -> bool:
    lo, hi = face.lattice_bounds()
    for verts, _mult in chain.term_items():
        for v in verts:
            t = grid.to_lattice(v)
            for i in range(grid.n):
                if not (lo[i] <= t[i] <= hi[i]):
                    return False
    return True


def _no_open_face_mass(chain: PolyhedralChain, grid: Grid, face: FaceId) -> bool:
    part_q, _rest = _face_pieces(chain, grid, face)
    return part_q.is_zero


# -- sweeping a region of faces ----------------------------------------------


@dataclass
class SkeletonCertificate:
    """Aggregate evidence for a full sweep down to the k-skeleton."""
    h_mass_input: MassValue
    h_mass_output: MassValue
    h_mass_U: MassValue
    h_mass_V: MassValue
    residual_is_zero: bool
    boundary_preserved: bool
    skeleton_dim: int | None
    faces_processed: int
    max_ratios: dict
    face_certificates: list = field(default_factory=list)

    def to_json(self):
        return {
            "h_mass_input": self.h_mass_input.to_json(),
            "h_mass_output": self.h_mass_output.to_json(),
            "h_mass_U": self.h_mass_U.to_json(),
            "h_mass_V": self.h_mass_V.to_json(),
            "residual_is_zero": self.residual_is_zero,
            "boundary_preserved": self.boundary_preserved,
            "skeleton_dim": self.skeleton_dim,
            "faces_processed": self.faces_processed,
            "max_ratios": self.max_ratios,
            "faces": [c.to_json() for c in self.face_certificates],
        }


def deform_region(chain: PolyhedralChain, grid: Grid, cost: CostFunction,
                  rng_seed: int, face_filter=None, active_regions=None,
                  kappa: Fraction = KAPPA_DEFAULT, verify: bool = True,
                  assume_canonical: bool = False):
    """Sweep face dimensions n, n-1, ..., k+1 over the chain's support.

    Every open face of the current level that carries mass (and passes
    `face_filter`, when given) is deformed with `local_deform`; per-face
    seeds derive from (rng_seed, face address).  When `active_regions` is
    given, the chain is exactly clipped against those convex regions and
    only the inside parts enter the sweep; the rest is carried through
    untouched (the sweep must not have processable faces out there).

    Returns (P, U, V, SkeletonCertificate).
    """
    work = canonicalize(chain)
    k = work.dim
    n = work.ambient
    mh_in = work.mass_report(cost, canonical=True).h_mass
    u_total = PolyhedralChain.zero(k, n)
    v_total = PolyhedralChain.zero(k + 1, n)
    face_certs = []
    faces_done = 0

    passive = PolyhedralChain.zero(k, n)
    active = work
    if active_regions is not None:
        from .chains import clip_chain as _clip
        parts = []
        rest = work
        for region in active_regions:
            inside, rest = _clip(rest, region, mode="closed")
            parts.append(inside)
            if rest.is_zero:
                break
        active = PolyhedralChain.zero(k, n)
        for part in parts:
            active = active + part
        passive = rest

    for level in range(n, k, -1):
        if active.is_zero:
            break
        faces = sorted({located for _v, _m, located in split_by_grid(active, grid)
                        if located.dim == level})
        for face in faces:
            if face_filter is not None and not face_filter(face):
                continue
            seed_f = face_seed(rng_seed, face)
            tilde, u_f, v_f, cert = local_deform(
                active, grid, face, cost, seed_f, kappa=kappa,
                assume_canonical=True, check_support=False,
                with_global_masses=False)
            active = tilde
            u_total = u_total + u_f
            v_total = v_total + v_f
            face_certs.append(cert)
            faces_done += 1

    p_chain = canonicalize(active + passive)
    u_total = canonicalize(u_total)
    v_total = canonicalize(v_total, allow_partial=(k + 1 > 2))

    residual_zero = True
    boundary_ok = True
    if verify:
        residual_zero = canonicalize(
            work - p_chain - u_total - v_total.boundary()).is_zero
        boundary_ok = canonicalize(
            (p_chain + u_total).boundary() - work.boundary()).is_zero

    mh_out = p_chain.mass_report(cost, canonical=True).h_mass
    mh_u = u_total.mass_report(cost, canonical=True).h_mass
    mh_v = (v_total.mass_report(cost, canonical=True).h_mass
            if k + 1 <= 2 else v_total.mass_upper_bound(cost))
    max_ratios = {}
    for cert in face_certs:
        for key, val in cert.ratios().items():
            max_ratios[key] = max(max_ratios.get(key, 0.0), val)
    return p_chain, u_total, v_total, SkeletonCertificate(
        h_mass_input=mh_in, h_mass_output=mh_out, h_mass_U=mh_u, h_mass_V=mh_v,
        residual_is_zero=residual_zero, boundary_preserved=boundary_ok,
        skeleton_dim=None, faces_processed=faces_done,
        max_ratios=max_ratios, face_certificates=face_certs)


def deform_to_skeleton(chain: PolyhedralChain, grid: Grid, cost: CostFunction,
                       rng_seed: int, region=None,
                       kappa: Fraction = KAPPA_DEFAULT):
    """Project the chain onto the k-skeleton of the grid.

    Sweeps all face dimensions from n down to k+1 over the support (or the
    given lattice `region` box).  Output P is supported on the k-skeleton;
    U collects the boundary homotopies (polyhedral since the input boundary
    is); chain = P + U + dV exactly.
    """
    from .grid import classify_support

    face_filter = None
    if region is not None:
        lo, hi = region

        def face_filter(face, _lo=lo, _hi=hi):
            flo, fhi = face.lattice_bounds()
            return all(_lo[i] <= flo[i] and fhi[i] <= _hi[i]
                       for i in range(len(_lo)))

    p_chain, u_total, v_total, cert = deform_region(
        chain, grid, cost, rng_seed, face_filter=face_filter, kappa=kappa)
    support = classify_support(grid, p_chain, assume_canonical=True)
    cert.skeleton_dim = support.skeleton_dim
    if region is None and not p_chain.is_zero:
        above = support.max_face_dim_above(chain.dim)
        if above is not None:
            raise ChainforgeError(
                f"skeleton sweep left mass in dimension {above}")
    return p_chain, u_total, v_total, cert
