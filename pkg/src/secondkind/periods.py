"""Period matrices of hyperelliptic curves by self-certifying quadrature.

Homology construction: branch points are sorted canonically and joined by
consecutive segments; the loop around segment k (doubled segment integral)
is the k-th chain cycle.  The basis

    a_k = chain(2k-2),   b_k = chain(2k-1) + chain(2k+1) + ...

is symplectic whenever the chain orientations are coherent.  Orientations
are not assumed: every sign pattern is tried in a fixed order and the first
one whose period matrices pass the Legendre relation, tau symmetry, and
Im tau > 0 is accepted.  These certificates are exactly the properties every
downstream formula relies on, so a certified bundle is correct by
construction regardless of how the branch points sit in the plane.

Segment integrals remove the endpoint square-root singularities with the
substitution x = m + h cos(theta), under which

    integral of N(x)/y dx over the segment
        = -(i/2) * integral_0^pi N(x(theta)) / S(cos theta) dtheta,

where y = 2 i h sin(theta) S(cos theta) on a fixed smooth branch and S is
the product of the continued square roots of the remaining linear factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .curves import CurvePoint, HyperellipticCurve, canonical_branch_order, second_kind_numerators
from .errors import HomologyConstructionFailure, PathThroughBranchPoint
from .paths import (
    PATH_CLEARANCE,
    adaptive_gl,
    integrate_rows_along,
    integrate_rows_to_branch_point,
    polyline_with_clearance,
)

#: Default quadrature tolerance.
DEFAULT_QUAD_TOL = 1e-12

_QUAD_TOL_RANGE = (1e-14, 1e-6)


@dataclass(frozen=True)
class HomologySpec:
    """Combinatorial description of the constructed homology basis.

    ``segment_pairs[k]`` are the canonical branch indices joined by chain k;
    ``a_members[j]`` / ``b_members[j]`` list the chain indices composing each
    cycle; ``chain_signs`` are the certified orientations.
    """

    segment_pairs: tuple
    a_members: tuple
    b_members: tuple
    chain_signs: tuple


def chain_intersection_matrix(g: int) -> np.ndarray:
    """Intersection matrix of (a_1..a_g, b_1..b_g) in the chain model.

    Consecutive chain loops meet once (c_k . c_{k+1} = +1, coherent
    orientation); all other pairs are disjoint.  A canonical basis must give
    [[0, I], [-I, 0]].
    """
    n = 2 * g
    c = np.zeros((n, n))
    for k in range(n - 1):
        c[k, k + 1] = 1.0
        c[k + 1, k] = -1.0
    basis = np.zeros((n, n))
    for j in range(g):
        basis[j, 2 * j] = 1.0  # a_j = chain 2j
        for k in range(2 * j + 1, n, 2):
            basis[g + j, k] = 1.0  # b_j = chain (2j+1) + chain (2j+3) + ...
    return basis @ c @ basis.T


@dataclass
class PeriodBundle:
    """Half period matrices and everything derived from them.

    omega, omega_prime, eta, eta_prime are the HALF matrices (the full
    period of a cycle is twice the entry).  ``winding`` holds the columns
    (U, V) of (2 omega)^{-1} for genus 2, None for genus 1.
    """

    omega: np.ndarray
    omega_prime: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    tau: np.ndarray
    kappa: np.ndarray
    winding: tuple | None
    legendre_defect: float
    tau_asymmetry: float
    kappa_asymmetry: float
    im_tau_min_eig: float
    eta_prime_consistency: float
    homology: HomologySpec
    canonical_points: tuple
    quad_tol: float

    @property
    def genus(self) -> int:
        return self.omega.shape[0]

    @property
    def two_omega(self) -> np.ndarray:
        return 2.0 * self.omega

    @property
    def two_omega_prime(self) -> np.ndarray:
        return 2.0 * self.omega_prime

    @property
    def inv_two_omega(self) -> np.ndarray:
        return np.linalg.inv(self.two_omega)


def _block_legendre_defect(omega, omega_prime, eta, eta_prime) -> float:
    g = omega.shape[0]
    m = np.block([[omega, omega_prime], [eta, eta_prime]])
    jj = np.block(
        [[np.zeros((g, g)), -np.eye(g)], [np.eye(g), np.zeros((g, g))]]
    ).astype(complex)
    return float(np.max(np.abs(m @ jj @ m.T + (0.5j * np.pi) * jj)))


def legendre_defect(bundle: PeriodBundle) -> float:
    """Max-norm deviation of the generalized Legendre relation."""
    return _block_legendre_defect(
        bundle.omega, bundle.omega_prime, bundle.eta, bundle.eta_prime
    )


def _factor_branches(points, a_idx: int, b_idx: int):
    """Continuation data for sqrt(x - e_k) along the segment, per other root."""
    ea, eb = points[a_idx], points[b_idx]
    m, h = 0.5 * (ea + eb), 0.5 * (eb - ea)
    data = []
    for k, e in enumerate(points):
        if k in (a_idx, b_idx):
            continue
        c0 = m - e
        ustar, crossing = 0.0, False
        if h.imag != 0.0:
            ustar = -c0.imag / h.imag
            if abs(ustar) < 1.0 and (c0 + h * ustar).real < 0.0:
                crossing = True
        data.append((c0, ustar, crossing))
    return m, h, data


def segment_integral(curve: HyperellipticCurve, points, a_idx: int, b_idx: int,
                     numerators_fn, quad_tol: float) -> np.ndarray:
    """Integral of numerators(x)/y dx over the open segment (e_a, e_b).

    The branch of y is the substitution branch described in the module
    docstring; its global sign is calibrated downstream.  numerators_fn maps
    an x array to an array (rows, nodes).
    """
    m, h, data = _factor_branches(points, a_idx, b_idx)

    def s_product(u):
        acc = np.ones(u.shape, dtype=complex)
        for c0, ustar, crossing in data:
            vals = np.sqrt(c0 + h * u)
            if crossing:
                vals = vals * np.where(u > ustar, -1.0, 1.0)
            acc = acc * vals
        return acc

    def f(theta):
        u = np.cos(theta)
        x = m + h * u
        return np.asarray(numerators_fn(x)) * (-0.5j / s_product(u))

    return adaptive_gl(f, 0.0, np.pi, quad_tol)


def _period_numerators(curve: HyperellipticCurve):
    g = curve.genus
    qs = second_kind_numerators(curve)

    def rows(x):
        out = [x ** i for i in range(g)]
        out.extend(npoly.polyval(x, q) / 4.0 for q in qs)
        return np.vstack(out)

    return rows


def _sign_patterns(n: int):
    first = (1,) * n
    yield first
    for p in itertools.product((1, -1), repeat=n):
        if p != first:
            yield p


def compute_periods(curve: HyperellipticCurve, quad_tol: float = DEFAULT_QUAD_TOL) -> PeriodBundle:
    """Compute 2omega, 2omega', 2eta, 2eta', tau, kappa with certification.

    Raises HomologyConstructionFailure when no chain orientation passes the
    Legendre/symmetry/positivity gates (pathological configurations), and
    QuadratureNonConvergence when a segment integral cannot reach quad_tol.
    """
    if not (_QUAD_TOL_RANGE[0] <= quad_tol <= _QUAD_TOL_RANGE[1]):
        raise ValueError(f"quad_tol must lie in {_QUAD_TOL_RANGE}")
    g = curve.genus
    if g not in (1, 2):
        raise ValueError("periods implemented for genus 1 and 2 only")
    pts = canonical_branch_order(curve.branch_points)
    scale = max(1.0, max(abs(e) for e in pts))
    n_chains = 2 * g
    for k in range(n_chains):
        seg_a, seg_b = pts[k], pts[k + 1]
        for j, e in enumerate(pts):
            if j in (k, k + 1):
                continue
            d = _seg_dist(seg_a, seg_b, e)
            if d < 1e-6 * scale:
                raise HomologyConstructionFailure(
                    f"branch point {j} sits on segment ({k}, {k + 1}) (distance {d:.2e})"
                )
    rows = _period_numerators(curve)
    chains = np.column_stack(
        [2.0 * segment_integral(curve, pts, k, k + 1, rows, quad_tol) for k in range(n_chains)]
    )

    sym_gate = max(1e-10, 100.0 * quad_tol)
    leg_gate = max(1e-9, 1000.0 * quad_tol)

    for signs in _sign_patterns(n_chains):
        cyc = chains * np.asarray(signs, dtype=float)[None, :]
        a_cols = np.column_stack([cyc[:, 2 * j] for j in range(g)])
        b_cols = np.column_stack(
            [cyc[:, 2 * j + 1 :: 2].sum(axis=1) for j in range(g)]
        )
        two_w, two_e = a_cols[:g, :], -a_cols[g:, :]
        two_wp, two_ep = b_cols[:g, :], -b_cols[g:, :]
        if abs(np.linalg.det(two_w)) < 1e-12:
            continue
        tau = np.linalg.solve(two_w, two_wp)
        tau_asym = float(np.max(np.abs(tau - tau.T)))
        if tau_asym > sym_gate * max(1.0, float(np.max(np.abs(tau)))):
            continue
        tau_sym = 0.5 * (tau + tau.T)
        eig_min = float(np.linalg.eigvalsh(tau_sym.imag)[0])
        if eig_min <= 0.0:
            continue
        defect = _block_legendre_defect(two_w / 2, two_wp / 2, two_e / 2, two_ep / 2)
        if defect > leg_gate:
            continue

        inv_two_w = np.linalg.inv(two_w)
        kappa_raw = (two_e / 2) @ inv_two_w
        kappa_asym = float(np.max(np.abs(kappa_raw - kappa_raw.T)))
        kappa = 0.5 * (kappa_raw + kappa_raw.T)
        eta_p_pred = kappa @ two_wp - 1j * np.pi * inv_two_w.T
        eta_p_cons = float(np.max(np.abs(eta_p_pred - two_ep / 2)))
        winding = None
        if g == 2:
            winding = (inv_two_w[:, 0].copy(), inv_two_w[:, 1].copy())
        homology = HomologySpec(
            segment_pairs=tuple((k, k + 1) for k in range(n_chains)),
            a_members=tuple((2 * j,) for j in range(g)),
            b_members=tuple(tuple(range(2 * j + 1, n_chains, 2)) for j in range(g)),
            chain_signs=tuple(signs),
        )
        return PeriodBundle(
            omega=two_w / 2,
            omega_prime=two_wp / 2,
            eta=two_e / 2,
            eta_prime=two_ep / 2,
            tau=tau_sym,
            kappa=kappa,
            winding=winding,
            legendre_defect=defect,
            tau_asymmetry=tau_asym,
            kappa_asymmetry=kappa_asym,
            im_tau_min_eig=eig_min,
            eta_prime_consistency=eta_p_cons,
            homology=homology,
            canonical_points=pts,
            quad_tol=quad_tol,
        )
    raise HomologyConstructionFailure(
        "no chain orientation produced a certified canonical basis"
    )


def lattice_distance(v: np.ndarray, tau: np.ndarray) -> float:
    """Distance from v to the lattice Z^g + tau Z^g, in coefficient max-norm.

    Solves v = alpha + tau beta for real alpha, beta and measures how far
    (alpha, beta) is from the nearest integer pair.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    g = tau.shape[0]
    m = np.block([[np.eye(g), tau.real], [np.zeros((g, g)), tau.imag]])
    ab = np.linalg.solve(m, np.concatenate([v.real, v.imag]))
    return float(np.max(np.abs(ab - np.round(ab))))


def _seg_dist(z0: complex, z1: complex, p: complex) -> float:
    d = z1 - z0
    t = ((p - z0) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (z0 + t * d))


def _u_rows(curve: HyperellipticCurve):
    g = curve.genus

    def rows(x, y):
        return np.vstack([x ** i / y for i in range(g)])

    return rows


def _check_point(curve: HyperellipticCurve, p: CurvePoint) -> None:
    miss = abs(p.y ** 2 - curve.y_squared(p.x))
    if miss > 1e-9 * (1.0 + abs(p.x) ** (2 * curve.genus + 1)):
        raise ValueError(f"point ({p.x:.6g}, {p.y:.6g}) is not on the curve")


def abel_map(curve: HyperellipticCurve, bundle: PeriodBundle, frm: CurvePoint,
             to: CurvePoint, quad_tol: float | None = None, return_path: bool = False):
    """(2 omega)^{-1} integral of the u-basis from ``frm`` to ``to``.

    The path is the straight segment with arc detours inserted wherever it
    would pass within the branch-point clearance; y is continued analytically
    along it.  An endpoint lying on a branch point (y = 0) is integrated with
    the regularized s^2 substitution.
    """
    tol = bundle.quad_tol if quad_tol is None else quad_tol
    _check_point(curve, frm)
    _check_point(curve, to)
    rows = _u_rows(curve)
    scale = max(1.0, max(abs(e) for e in curve.branch_points))

    def is_branch(p: CurvePoint):
        if abs(p.y) > 1e-8 * scale:
            return None
        k = int(np.argmin([abs(p.x - e) for e in curve.branch_points]))
        return k

    frm_idx, to_idx = is_branch(frm), is_branch(to)
    if frm_idx is not None and to_idx is not None:
        raise PathThroughBranchPoint("both endpoints on branch points; split the path")
    if frm_idx is not None:
        # reverse the regularized direction: integral from e to x equals
        # minus the integral from x into e on the same sheet
        val, path = _integral_into_branch(curve, to, frm_idx, rows, tol)
        total = -val
    elif to_idx is not None:
        total, path = _integral_into_branch(curve, frm, to_idx, rows, tol)
    else:
        path = None
        for pts in _candidate_routes(frm.x, to.x, curve.branch_points, PATH_CLEARANCE):
            total, y_end = integrate_rows_along(curve, pts, frm.y, rows, tol)
            if abs(y_end - to.y) <= abs(y_end + to.y):
                path = pts
                break
        if path is None:
            raise PathThroughBranchPoint(
                "endpoint sheet does not match continuation along any route"
            )
    value = bundle.inv_two_omega @ total
    if return_path:
        return value, path
    return value


def _candidate_routes(z0: complex, z1: complex, branch, clearance: float):
    """Routes from z0 to z1 in successively adjusted homotopy classes.

    First the direct polyline; then a route via a point far outside the
    branch points; then the same route with a loop inserted around ALL
    branch points.  The loop winds around an odd number of them (2g + 1),
    so it is guaranteed to swap sheets relative to the second route, and it
    runs far from every obstacle.
    """
    yield polyline_with_clearance(z0, z1, branch, clearance)
    center = sum(branch) / len(branch)
    rad = 1.6 * max(abs(e - center) for e in branch) + 1.0
    zfar = center + rad * np.exp(1j * np.pi / 7)
    head = polyline_with_clearance(z0, zfar, branch, clearance)
    tail = polyline_with_clearance(zfar, z1, branch, clearance)
    yield head + tail[1:]
    loop = tuple(
        center + rad * np.exp(1j * (np.pi / 7 + 2.0 * np.pi * k / 8.0)) for k in range(1, 8)
    ) + (zfar,)
    yield head + loop + tail[1:]


def _integral_into_branch(curve, start: CurvePoint, e_index: int, rows, tol):
    e = curve.branch_points[e_index]
    others = [p for k, p in enumerate(curve.branch_points) if k != e_index]
    gap = min(abs(e - p) for p in others)
    if abs(start.x - e) < 1e-13:
        raise PathThroughBranchPoint("zero-length regularized leg")
    direction = (start.x - e) / abs(start.x - e)
    stage_dist = min(0.35 * gap, abs(start.x - e))
    x_stage = e + direction * stage_dist
    pts = polyline_with_clearance(start.x, x_stage, others, PATH_CLEARANCE)
    part1, y_stage = integrate_rows_along(curve, pts, start.y, rows, tol)
    part2 = integrate_rows_to_branch_point(curve, e_index, x_stage, y_stage, rows, tol)
    return part1 + part2, pts + (e,)


def abel_from_infinity(curve: HyperellipticCurve, bundle: PeriodBundle,
                       to: CurvePoint, quad_tol: float | None = None) -> np.ndarray:
    """(2 omega)^{-1} integral of u from the point at infinity to ``to``.

    Regularized near infinity by x = 1/xi^2: along the real xi segment
    [0, xi_far] the integrand of u_i is -xi^(2g-2i) / sqrt(T(xi)) with T the
    even polynomial 1 + sum_k lam_k xi^(2(2g+1-k)) / 4, which stays near 1
    for x_far well outside the branch points.  The remaining finite path is
    handled by abel_map.
    """
    tol = bundle.quad_tol if quad_tol is None else quad_tol
    g = curve.genus
    scale = max(1.0, max(abs(e) for e in curve.branch_points))
    x_far = 40.0 * scale ** 2 * np.exp(1j * np.pi / 7)
    xi_far = 1.0 / np.sqrt(x_far)  # principal; fixes the sheet at infinity

    tpoly = np.zeros(2 * (2 * g + 1) + 1, dtype=complex)
    tpoly[0] = 1.0
    for k in range(2 * g + 1):
        tpoly[2 * (2 * g + 1 - k)] += curve.lam_at(k) / 4.0

    def rows_xi(t):
        xi = xi_far * t
        tv = npoly.polyval(xi, tpoly)
        return np.vstack([-(xi ** (2 * g - 2 * i)) / np.sqrt(tv) for i in range(1, g + 1)]) * xi_far

    tail = adaptive_gl(rows_xi, 0.0, 1.0, tol)
    y_far = 2.0 * xi_far ** (-(2 * g + 1)) * np.sqrt(complex(npoly.polyval(complex(xi_far), tpoly)))
    far_point = CurvePoint(complex(x_far), complex(y_far), 1)
    finite = abel_map(curve, bundle, far_point, to, quad_tol=tol)
    return bundle.inv_two_omega @ tail + finite


def a_cycle_integral(curve: HyperellipticCurve, bundle: PeriodBundle, j: int,
                     numerators_fn, quad_tol: float | None = None) -> np.ndarray:
    """Loop integral over the cycle a_j of numerators(x)/y dx.

    Only the part of the integrand odd in y contributes to a loop integral
    (the even part cancels between the two sheets), and that part doubles,
    so the cycle integral is 2 x (sign) x (segment integral) per chain.
    """
    tol = bundle.quad_tol if quad_tol is None else quad_tol
    pts = bundle.canonical_points
    total = None
    for k in bundle.homology.a_members[j]:
        a_idx, b_idx = bundle.homology.segment_pairs[k]
        part = 2.0 * bundle.homology.chain_signs[k] * segment_integral(
            curve, pts, a_idx, b_idx, numerators_fn, tol
        )
        total = part if total is None else total + part
    return total
