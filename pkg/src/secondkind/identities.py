"""Theta-constant representations of kappa and related identities.

kappa = eta (2 omega)^{-1} is computed here through several independent
routes: even-characteristic Hessians (one per branch pair and their sum),
odd-characteristic third derivatives (one per admissible branch point and
their sum), and compared against the quadrature value from the period
bundle.  The module also evaluates Thomae-type derivative relations,
classical and higher Rosenhain formulas, genus-1 Weierstrass formulas,
Jacobi inversion values, and the two realizations of the symmetric
bi-differential.

Directional derivatives Theta_a, Theta_ab, Theta_abc are contractions of
plain z-derivatives of theta at z = 0 with the winding vectors (columns of
(2 omega)^{-1}); they live in the ThetaTable.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .curves import CurvePoint, HyperellipticCurve, kleinian_polar
from .errors import GammaCharacteristic, StencilDegenerate
from .correspondence import BranchMatching, even_char_for_pair
from .paths import PATH_CLEARANCE
from .periods import PeriodBundle, a_cycle_integral, abel_map
from .theta import Characteristic, ThetaTable, char, char_add, half_period

#: Below this magnitude on both sides a defect is reported absolutely.
ABSOLUTE_FLOOR = 1e-6

#: Finite-difference step of the bi-differential stencil.
STENCIL_STEP = 1e-4


def relative_defect(lhs: complex, rhs: complex) -> float:
    """|lhs - rhs| relative to the larger side; absolute when both tiny."""
    big = max(abs(lhs), abs(rhs))
    d = abs(lhs - rhs)
    return d if big < ABSOLUTE_FLOOR else d / big


@dataclass(frozen=True)
class IdentityEntry:
    """One verified identity: two sides, their defect, optional sign choice."""

    label: str
    lhs: complex
    rhs: complex
    defect: float
    sign: int | None = None
    status: str = "pass"


@dataclass(frozen=True, eq=False)
class IdentityDefects:
    """Ordered collection of identity entries, addressable by label."""

    entries: tuple

    def __getitem__(self, label: str) -> IdentityEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def labels(self):
        return tuple(e.label for e in self.entries)

    def max_defect(self) -> float:
        vals = [e.defect for e in self.entries if e.status != "n/a"]
        return max(vals) if vals else 0.0


@dataclass(frozen=True, eq=False)
class KappaReport:
    """kappa by every route, with max-norm deviations from the direct value."""

    kappa_direct: np.ndarray
    kappa_by_even_pair: dict
    kappa_even_sum: np.ndarray
    kappa_by_odd: dict
    kappa_odd_sum: np.ndarray
    defect_table: dict


def _entry(label, lhs, rhs, tol, sign=None, applicable=True) -> IdentityEntry:
    lhs, rhs = complex(lhs), complex(rhs)
    d = relative_defect(lhs, rhs)
    if not applicable:
        status = "n/a"
    else:
        status = "pass" if d < tol else "fail"
    return IdentityEntry(label, lhs, rhs, d, sign, status)


def _pair_complement(i: int, j: int):
    return tuple(k for k in range(1, 6) if k not in (i, j))


def kappa_even_pair(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                    m: BranchMatching, i: int, j: int) -> np.ndarray:
    """kappa from the even characteristic of the branch pair {i, j}.

    Uses the plain z-Hessian of theta conjugated by (2 omega)^{-1}, so the
    route is independent of the directional table.
    """
    e = bundle.canonical_points
    ei, ej = e[i - 1], e[j - 1]
    k, mm, n = (e[t - 1] for t in _pair_complement(i, j))
    sym = np.array(
        [
            [ei * ej * (k + mm + n) + k * mm * n, -ei * ej],
            [-ei * ej, ei + ej],
        ]
    )
    eps = even_char_for_pair(m, i, j)
    ent = tt.entry(eps)
    hess = ent.hess_arr() / ent.value
    w = bundle.inv_two_omega
    return -0.5 * sym - 0.5 * (w.T @ hess @ w)


def kappa_even_sum(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable) -> np.ndarray:
    """kappa from the sum over all 10 even characteristics."""
    lam2, lam3, lam4 = (curve.lam_at(k) for k in (2, 3, 4))
    lead = np.array([[4 * lam2, lam3], [lam3, 4 * lam4]]) / 80.0
    acc = np.zeros((2, 2), dtype=complex)
    for eps in tt.even:
        th = tt.value(eps)
        acc += np.array(
            [
                [tt.D(eps, "11"), tt.D(eps, "12")],
                [tt.D(eps, "12"), tt.D(eps, "22")],
            ]
        ) / th
    return lead - acc / 20.0


def _odd_char_and_point(bundle, m, which):
    if isinstance(which, Characteristic):
        ch = which
        if ch == m.gamma:
            raise GammaCharacteristic("Theta_2 vanishes for the Riemann-constant characteristic")
        idx = m.chars.index(ch)
    else:
        idx = int(which) - 1
        if not 0 <= idx < 5:
            raise ValueError("odd index must be a branch label in 1..5")
        ch = m.chars[idx]
    return ch, bundle.canonical_points[idx]


def kappa_odd_single(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                     m: BranchMatching, which) -> np.ndarray:
    """kappa from one admissible odd characteristic (branch label or char).

    Raises GammaCharacteristic when invoked with the degenerate one.
    """
    ch, ei = _odd_char_and_point(bundle, m, which)
    lam3, lam4 = curve.lam_at(3), curve.lam_at(4)
    t2 = tt.D(ch, "2")
    r222 = tt.D(ch, "222") / t2
    r122 = tt.D(ch, "122") / t2
    r112 = tt.D(ch, "112") / t2
    k22 = lam4 / 24.0 - ei / 6.0 - r222 / 6.0
    k12 = -lam4 * ei / 24.0 - ei ** 2 / 3.0 - ei * r222 / 12.0 - r122 / 4.0
    k11 = (
        -(lam3 / 8.0) * ei
        - (5.0 / 24.0) * lam4 * ei ** 2
        - (7.0 / 6.0) * ei ** 3
        - 0.5 * r112
        - 0.5 * ei * r122
        - (ei ** 2 / 6.0) * r222
    )
    return np.array([[k11, k12], [k12, k22]])


def kappa_odd_sum(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                  m: BranchMatching) -> np.ndarray:
    """kappa from sums of third-derivative ratios over the 5 admissible odds."""
    lam2, lam3, lam4 = (curve.lam_at(k) for k in (2, 3, 4))
    s222 = s122 = s112 = 0.0 + 0.0j
    for ch in m.chars:
        t2 = tt.D(ch, "2")
        s222 += tt.D(ch, "222") / t2
        s122 += tt.D(ch, "122") / t2
        s112 += tt.D(ch, "112") / t2
    k22 = lam4 / 20.0 - s222 / 30.0
    k12 = lam3 / 40.0 - lam4 ** 2 / 800.0 - s122 / 20.0 + lam4 * s222 / 1200.0
    k11 = (
        (3.0 / 40.0) * lam2
        - lam4 * lam3 / 400.0
        + lam4 ** 3 / 8000.0
        - s112 / 10.0
        + lam4 * s122 / 200.0
        - lam4 ** 2 * s222 / 12000.0
    )
    return np.array([[k11, k12], [k12, k22]])


def kappa_odd_sum_reduced(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                          m: BranchMatching) -> np.ndarray:
    """The lam4 = 0 display of the odd-sum formula, implemented verbatim.

    Only meaningful for curves with lam4 = 0; agreement with kappa_odd_sum
    to machine precision is a consistency check of the two displays.
    """
    lam2, lam3 = curve.lam_at(2), curve.lam_at(3)
    lead = np.array([[3 * lam2, lam3], [lam3, 0.0]]) / 40.0
    acc = np.zeros((2, 2), dtype=complex)
    for ch in m.chars:
        t2 = tt.D(ch, "2")
        acc += np.array(
            [
                [2.0 * tt.D(ch, "112"), tt.D(ch, "122")],
                [tt.D(ch, "122"), (2.0 / 3.0) * tt.D(ch, "222")],
            ]
        ) / t2
    return lead - acc / 20.0


def kappa_report(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                 m: BranchMatching) -> KappaReport:
    """Assemble every kappa route and its deviation from the direct value."""
    direct = bundle.kappa
    by_pair = {}
    defects = {}
    for i in range(1, 6):
        for j in range(i + 1, 6):
            kp = kappa_even_pair(curve, bundle, tt, m, i, j)
            by_pair[(i, j)] = kp
            defects[f"even_pair_{i}{j}"] = float(np.max(np.abs(kp - direct)))
    ks = kappa_even_sum(curve, bundle, tt)
    defects["even_sum"] = float(np.max(np.abs(ks - direct)))
    by_odd = {}
    for i in range(1, 6):
        ko = kappa_odd_single(curve, bundle, tt, m, i)
        by_odd[m.delta(i)] = ko
        defects[f"odd_{i}"] = float(np.max(np.abs(ko - direct)))
    kos = kappa_odd_sum(curve, bundle, tt, m)
    defects["odd_sum"] = float(np.max(np.abs(kos - direct)))
    for mat in [direct, ks, kos, *by_pair.values(), *by_odd.values()]:
        assert float(np.max(np.abs(mat - mat.T))) < 1e-9, "kappa must be symmetric"
    return KappaReport(
        kappa_direct=direct,
        kappa_by_even_pair=by_pair,
        kappa_even_sum=ks,
        kappa_by_odd=by_odd,
        kappa_odd_sum=kos,
        defect_table=defects,
    )


def thomae_defects(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                   m: BranchMatching, tol: float = 1e-8) -> IdentityDefects:
    """Thomae-type relations between odd third and even second derivatives.

    The 222 relation holds for every curve; the 122 and 112 relations
    require lam4 = 0 and are reported n/a otherwise.
    """
    lam2, lam3, lam4 = (curve.lam_at(k) for k in (2, 3, 4))
    scale = max(1.0, max(abs(e) for e in bundle.canonical_points))
    lam4_zero = abs(lam4) < 1e-10 * scale
    s222 = sum(tt.D(ch, "222") / tt.D(ch, "2") for ch in m.chars)
    s122 = sum(tt.D(ch, "122") / tt.D(ch, "2") for ch in m.chars)
    s112 = sum(tt.D(ch, "112") / tt.D(ch, "2") for ch in m.chars)
    e22 = sum(tt.D(eps, "22") / tt.value(eps) for eps in tt.even)
    e12 = sum(tt.D(eps, "12") / tt.value(eps) for eps in tt.even)
    e11 = sum(tt.D(eps, "11") / tt.value(eps) for eps in tt.even)
    entries = (
        _entry("thomae_222", s222, 1.5 * e22, tol),
        _entry("thomae_122", 4.0 * s122 - 4.0 * e12, lam3, tol, applicable=lam4_zero),
        _entry("thomae_112", 4.0 * s112 - 2.0 * e11, lam2, tol, applicable=lam4_zero),
    )
    return IdentityDefects(entries)


def thomae_genus1_defect(tt: ThetaTable, tol: float = 1e-10) -> IdentityEntry:
    """Genus-1 analog: theta1'''/theta1' equals the sum of theta_k''/theta_k."""
    if tt.genus != 1:
        raise ValueError("genus-1 table required")
    odd = tt.odd[0]
    lhs = tt.d(odd, 0, 0, 0) / tt.d(odd, 0)
    rhs = sum(tt.d(eps, 0, 0) / tt.value(eps) for eps in tt.even)
    return _entry("thomae_genus1", lhs, rhs, tol)


def _odd_labels(m: BranchMatching):
    # label 6 is the Riemann-constant characteristic
    return {**{i: m.chars[i - 1] for i in range(1, 6)}, 6: m.gamma}


def rosenhain_defects(bundle: PeriodBundle, tt: ThetaTable, m: BranchMatching,
                      tol: float = 1e-8) -> IdentityDefects:
    """Classical and higher derivative formulas for all 15 odd pairs.

    For the pair {i, j} the four even characteristics are delta_i + delta_j
    + delta_k over the remaining k.  Each formula carries an undetermined
    overall sign; the minimizing sign is recorded in the entry.
    """
    labels = _odd_labels(m)
    det_w = np.linalg.det(bundle.inv_two_omega)
    entries = []
    for i in range(1, 7):
        for j in range(i + 1, 7):
            di, dj = labels[i], labels[j]
            evens = []
            for k in range(1, 7):
                if k in (i, j):
                    continue
                eps = char_add(di, char_add(dj, labels[k]))
                assert eps.parity == 0
                evens.append(eps)
            assert len(set(evens)) == 4
            prod = 1.0 + 0.0j
            for eps in evens:
                prod *= tt.value(eps)

            rhs_cl = tt.d(di, 0) * tt.d(dj, 1) - tt.d(di, 1) * tt.d(dj, 0)
            lhs_cl = np.pi ** 2 * prod
            sign_cl = 1 if abs(lhs_cl - rhs_cl) <= abs(-lhs_cl - rhs_cl) else -1
            entries.append(
                _entry(f"rosenhain_classical_{i}{j}", sign_cl * lhs_cl, rhs_cl, tol, sign=sign_cl)
            )

            rhs_hi = tt.D(di, "222") * tt.D(dj, "2") - tt.D(dj, "222") * tt.D(di, "2")
            lhs_hi = np.pi ** 2 * det_w * prod
            sign_hi = 1 if abs(lhs_hi - rhs_hi) <= abs(-lhs_hi - rhs_hi) else -1
            entries.append(
                _entry(f"rosenhain_higher_{i}{j}", sign_hi * lhs_hi, rhs_hi, tol, sign=sign_hi)
            )
    return IdentityDefects(tuple(entries))


def rosenhain_gamma_pairs(bundle: PeriodBundle, tt: ThetaTable, m: BranchMatching,
                          tol: float = 1e-8) -> IdentityDefects:
    """Corrected higher derivative formula for pairs involving gamma.

    The third-derivative formula with constant pi^2 det(2 omega)^{-1} holds
    only when both characteristics are admissible (Theta_2 nonzero); when
    one of them is gamma the empirically exact constant is twice that:

        Theta_222[gamma] Theta_2[delta_i]
            = -/+ 2 pi^2 det((2 omega)^{-1}) prod_4 Theta[eps].

    The factor appears because the admissible-pair derivation divides by
    Theta_2 of both characteristics, which degenerates at gamma.
    """
    labels = _odd_labels(m)
    det_w = np.linalg.det(bundle.inv_two_omega)
    entries = []
    for i in range(1, 6):
        di = labels[i]
        prod = 1.0 + 0.0j
        for k in range(1, 6):
            if k == i:
                continue
            prod *= tt.value(char_add(di, char_add(m.gamma, labels[k])))
        lhs = 2.0 * np.pi ** 2 * det_w * prod
        rhs = tt.D(m.gamma, "222") * tt.D(di, "2")
        sign = 1 if abs(lhs - rhs) <= abs(-lhs - rhs) else -1
        entries.append(_entry(f"rosenhain_gamma_{i}6", sign * lhs, rhs, tol, sign=sign))
    return IdentityDefects(tuple(entries))


def weierstrass_eta(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                    tol: float = 1e-10) -> IdentityDefects:
    """Genus-1 formulas for eta via theta constants.

    The kappa formula holds for every lam2; the two plain eta forms require
    lam2 = 0 and are n/a otherwise.
    """
    if curve.genus != 1:
        raise ValueError("genus-1 curve required")
    lam2 = curve.lam_at(2)
    scale = max(1.0, max(abs(e) for e in curve.branch_points))
    lam2_zero = abs(lam2) < 1e-10 * scale
    w = bundle.omega[0, 0]
    eta = bundle.eta[0, 0]
    odd = tt.odd[0]
    ratio3 = tt.d(odd, 0, 0, 0) / tt.d(odd, 0)
    sum2 = sum(tt.d(eps, 0, 0) / tt.value(eps) for eps in tt.even)
    entries = (
        _entry("weierstrass_kappa", eta / (2.0 * w), lam2 / 24.0 - ratio3 / (24.0 * w ** 2), tol),
        _entry("weierstrass_eta_sum", eta, -sum2 / (12.0 * w), tol, applicable=lam2_zero),
        _entry("weierstrass_eta_third", eta, -ratio3 / (12.0 * w), tol, applicable=lam2_zero),
    )
    return IdentityDefects(entries)


def jacobi_inversion_check(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                           m: BranchMatching, i: int, j: int, tol: float = 1e-8) -> IdentityDefects:
    """Kleinian p-function values at the divisor of the branch pair {i, j}.

    p_ab = -2 kappa_ab - Theta_ab[eps_ij]/Theta[eps_ij]; compared against
    the symmetric functions of e_i, e_j and against the two-point polar.
    """
    e = bundle.canonical_points
    ei, ej = e[i - 1], e[j - 1]
    k, mm, n = (e[t - 1] for t in _pair_complement(i, j))
    eps = even_char_for_pair(m, i, j)
    th = tt.value(eps)
    kap = bundle.kappa
    p22 = -2.0 * kap[1, 1] - tt.D(eps, "22") / th
    p12 = -2.0 * kap[0, 1] - tt.D(eps, "12") / th
    p11 = -2.0 * kap[0, 0] - tt.D(eps, "11") / th
    sym11 = ei * ej * (k + mm + n) + k * mm * n
    polar11 = kleinian_polar(curve, ei, ej) / (4.0 * (ei - ej) ** 2)
    entries = (
        _entry(f"jacobi_p22_{i}{j}", p22, ei + ej, tol),
        _entry(f"jacobi_p12_{i}{j}", p12, -ei * ej, tol),
        _entry(f"jacobi_p11_{i}{j}", p11, sym11, tol),
        _entry(f"jacobi_p11_polar_{i}{j}", p11, polar11, tol),
    )
    return IdentityDefects(entries)


def omega_algebraic(curve: HyperellipticCurve, bundle: PeriodBundle,
                    q: CurvePoint, r: CurvePoint) -> complex:
    """Coefficient of the symmetric bi-differential against dx dz."""
    g = curve.genus
    xs = np.array([q.x ** t for t in range(g)])
    zs = np.array([r.x ** t for t in range(g)])
    f = kleinian_polar(curve, q.x, r.x)
    core = (2.0 * q.y * r.y + f) / (4.0 * (q.x - r.x) ** 2)
    return (core + 2.0 * xs @ bundle.kappa @ zs) / (q.y * r.y)


def _lift_near(curve: HyperellipticCurve, x: complex, y_ref: complex) -> CurvePoint:
    y = np.sqrt(curve.y_squared(x))
    if abs(y - y_ref) > abs(y + y_ref):
        y = -y
    return CurvePoint(x, y)


def omega_consistency(curve: HyperellipticCurve, bundle: PeriodBundle, tt: ThetaTable,
                      q: CurvePoint, r: CurvePoint, a_vec: np.ndarray,
                      step: float = STENCIL_STEP) -> float:
    """Relative defect between the two realizations of the bi-differential.

    The theta side is the mixed second difference of ln theta(a + int_r^q v)
    over a 4-point stencil in the x-coordinates of both points.  a_vec must
    be a non-singular point of the theta divisor (an odd half-period).
    """
    for p in (q, r):
        d = min(abs(p.x - e) for e in curve.branch_points)
        if d < max(PATH_CLEARANCE, 10.0 * step):
            raise StencilDegenerate(f"stencil at x = {p.x:.6g} too close to a branch point")
    if abs(q.x - r.x) < 100.0 * step:
        raise StencilDegenerate("stencil points too close to each other")

    base = abel_map(curve, bundle, r, q)
    qp = _lift_near(curve, q.x + step, q.y)
    qm = _lift_near(curve, q.x - step, q.y)
    rp = _lift_near(curve, r.x + step, r.y)
    rm = _lift_near(curve, r.x - step, r.y)
    # the base error is common to all four corners and cancels in the mixed
    # difference; the four leg errors do not, and they are divided by 4 h^2,
    # so the legs are integrated at the tolerance floor
    leg_tol = 1e-14
    dq = {1: abel_map(curve, bundle, q, qp, quad_tol=leg_tol),
          -1: abel_map(curve, bundle, q, qm, quad_tol=leg_tol)}
    dr = {1: abel_map(curve, bundle, r, rp, quad_tol=leg_tol),
          -1: abel_map(curve, bundle, r, rm, quad_tol=leg_tol)}

    vals = {}
    for sq in (1, -1):
        for sr in (1, -1):
            z = a_vec + base + dq[sq] - dr[sr]
            vals[(sq, sr)] = complex(_theta_plain(tt, z))
    ref = vals[(1, 1)]
    logs = {k: cmath.log(v / ref) for k, v in vals.items()}
    mixed = (logs[(1, 1)] - logs[(1, -1)] - logs[(-1, 1)] + logs[(-1, -1)]) / (4.0 * step * step)
    alg = omega_algebraic(curve, bundle, q, r)
    return relative_defect(alg, mixed)


def _theta_plain(tt: ThetaTable, z: np.ndarray) -> complex:
    from .theta import theta_eval, char

    zero = char((0,) * tt.genus, (0,) * tt.genus)
    return theta_eval(z, tt.tau, zero, tol=tt.tol)


def omega_a_period(curve: HyperellipticCurve, bundle: PeriodBundle, j: int,
                   r: CurvePoint, quad_tol: float | None = None) -> complex:
    """Integral of the bi-differential over the a_j cycle (j 1-based).

    The part of the integrand even in y cancels between the sheets; the odd
    part is integrated by the regular segment quadrature.  The result must
    vanish for a normalized bi-differential.
    """
    g = curve.genus
    if not 1 <= j <= g:
        raise ValueError("cycle label must be in 1..genus")
    kap = bundle.kappa
    zs = np.array([r.x ** t for t in range(g)])
    kz = kap @ zs

    def rows(x):
        f = kleinian_polar(curve, x, r.x)
        xs = np.vstack([x ** t for t in range(g)])
        val = (f / (4.0 * (x - r.x) ** 2) + 2.0 * np.einsum("i,in->n", kz, xs)) / r.y
        return val[None, :]

    return complex(a_cycle_integral(curve, bundle, j - 1, rows, quad_tol)[0])
