"""Plane curve data: hyperelliptic coefficients, branch points, differential
bases, the symmetric 2-polar, and the projective connection term.

A hyperelliptic curve of genus g is stored in the normalization

    y^2 = 4 x^(2g+1) + lam_{2g} x^(2g) + ... + lam_1 x + lam_0,

so the leading coefficient is always 4 and the degree is odd: there is a
single point at infinity.  Coefficients are kept in ascending order
(lam[0] = lam_0).  More general (n, s) shapes appear only through
:class:`NSCurveShape`, which carries the coefficient polynomials of

    f(x, y) = y^n - a_{n-1}(x) y^(n-1) - ... - a_1(x) y - a_0(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    AtBranchPoint,
    DegenerateCurve,
    InvalidPair,
    RootFindingFailure,
    UnsupportedDegree,
)

#: Relative separation below which two branch points count as coincident.
DEGENERACY_TOL = 1e-10

#: Required relative residual after root polishing.
ROOT_RESIDUAL_TOL = 1e-13


@dataclass(frozen=True)
class HyperellipticCurve:
    """Immutable curve record.

    ``lam`` holds (lam_0, ..., lam_{2g}); ``branch_points`` holds the finite
    roots e_1..e_{2g+1} in the order the curve was constructed with (input
    order for :func:`curve_from_branch_points`, canonical order otherwise).
    """

    genus: int
    lam: tuple
    branch_points: tuple

    @property
    def coeffs(self) -> np.ndarray:
        """Full ascending coefficient vector of y^2, degree 2g+1, leading 4."""
        return np.asarray(list(self.lam) + [4.0], dtype=complex)

    def lam_at(self, k: int) -> complex:
        """lam_k with the padding lam_{2g+1} = 4 and lam_{2g+2} = 0."""
        n = 2 * self.genus + 1
        if k < 0 or k > n + 1:
            raise IndexError(k)
        if k == n:
            return 4.0 + 0.0j
        if k == n + 1:
            return 0.0 + 0.0j
        return self.lam[k]

    def y_squared(self, x):
        """Evaluate y^2 = 4 prod (x - e_k) in product form (stable near roots)."""
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, 4.0, dtype=complex)
        for e in self.branch_points:
            out = out * (x - e)
        return out if out.shape else complex(out)

    def lift(self, x, sheet: int = 1) -> "CurvePoint":
        """Point above x on the sheet marked by the sign of the principal root."""
        if sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        y = sheet * np.sqrt(complex(self.y_squared(x)))
        return CurvePoint(complex(x), complex(y), sheet)


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) together with the sheet marker used to build it."""

    x: complex
    y: complex
    sheet: int = 1


def _branch_scale(points) -> float:
    return max(1.0, max(abs(e) for e in points))


def _check_separation(points, tol: float) -> None:
    pts = list(points)
    scale = _branch_scale(pts)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) < tol * scale:
                raise DegenerateCurve(
                    f"branch points {i} and {j} separated by "
                    f"{abs(pts[i] - pts[j]):.3e} < {tol:.1e} * {scale:.3e}"
                )


def canonical_branch_order(points):
    """Sort branch points by (real part, imaginary part)."""
    return tuple(sorted((complex(e) for e in points), key=lambda z: (z.real, z.imag)))


def curve_from_coefficients(lam, degeneracy_tol: float = DEGENERACY_TOL) -> HyperellipticCurve:
    """Build a curve from (lam_0, ..., lam_{2g}); branch points are solved for.

    Roots come from the companion matrix and are polished by Newton steps;
    each must reach relative residual below ``ROOT_RESIDUAL_TOL``.
    """
    lam = tuple(complex(v) for v in lam)
    if len(lam) < 3 or len(lam) % 2 == 0:
        raise ValueError("expected an odd number >= 3 of coefficients lam_0..lam_2g")
    genus = (len(lam) - 1) // 2
    coeffs = np.asarray(list(lam) + [4.0], dtype=complex)
    roots = np.roots(coeffs[::-1])
    dcoeffs = npoly.polyder(coeffs)
    for _ in range(4):
        p = npoly.polyval(roots, coeffs)
        dp = npoly.polyval(roots, dcoeffs)
        step = np.where(np.abs(dp) > 0, p / np.where(dp == 0, 1, dp), 0)
        roots = roots - step
    # relative residual against the magnitude of the evaluated terms
    scale = sum(abs(c) * np.maximum(1.0, np.abs(roots)) ** k for k, c in enumerate(coeffs))
    resid = np.abs(npoly.polyval(roots, coeffs)) / scale
    if np.any(resid > ROOT_RESIDUAL_TOL):
        raise RootFindingFailure(
            f"max polished residual {float(np.max(resid)):.3e} > {ROOT_RESIDUAL_TOL:.1e}"
        )
    pts = canonical_branch_order(roots)
    _check_separation(pts, degeneracy_tol)
    return HyperellipticCurve(genus, lam, pts)


def curve_from_branch_points(points, degeneracy_tol: float = DEGENERACY_TOL) -> HyperellipticCurve:
    """Build a curve from finite branch points (kept in input order).

    Coefficients come from expanding 4 prod (x - e_i).
    """
    pts = tuple(complex(e) for e in points)
    if len(pts) < 3 or len(pts) % 2 == 0:
        raise ValueError("expected an odd number >= 3 of branch points")
    _check_separation(pts, degeneracy_tol)
    genus = (len(pts) - 1) // 2
    coeffs = np.array([4.0], dtype=complex)
    for e in pts:
        coeffs = npoly.polymul(coeffs, np.array([-e, 1.0], dtype=complex))
    return HyperellipticCurve(genus, tuple(coeffs[: 2 * genus + 1]), pts)


def branch_points(curve: HyperellipticCurve):
    """Finite branch points in canonical (real, imaginary) sort order."""
    return canonical_branch_order(curve.branch_points)


def gap_sequence(n: int, s: int):
    """Weierstrass gap sequence at the point at infinity of an (n, s) curve.

    The gaps are the positive integers not representable as alpha*n + beta*s
    with alpha, beta >= 0; there are exactly (n-1)(s-1)/2 of them.
    """
    if n < 2 or s <= n or math.gcd(n, s) != 1:
        raise InvalidPair(f"(n, s) = ({n}, {s}) needs 2 <= n < s and gcd 1")
    frobenius = n * s - n - s
    representable = [False] * (frobenius + 1)
    representable[0] = True
    for a in range(0, frobenius + 1, 1):
        if representable[a]:
            if a + n <= frobenius:
                representable[a + n] = True
            if a + s <= frobenius:
                representable[a + s] = True
    gaps = tuple(m for m in range(1, frobenius + 1) if not representable[m])
    assert len(gaps) == (n - 1) * (s - 1) // 2
    return gaps


def kleinian_polar(curve: HyperellipticCurve, x, z):
    """Symmetric 2-polar F(x, z) of the defining polynomial.

    F(x, z) = sum_{k=0}^{g} x^k z^k (2 lam_{2k} + lam_{2k+1} (x + z)),
    normalized so that F(x, x) = 2 y(x)^2.
    """
    x = np.asarray(x, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(np.broadcast(x, z).shape, dtype=complex)
    for k in range(curve.genus + 1):
        out = out + (x * z) ** k * (2 * curve.lam_at(2 * k) + curve.lam_at(2 * k + 1) * (x + z))
    return out if out.shape else complex(out)


def second_kind_numerators(curve: HyperellipticCurve):
    """Ascending coefficient arrays q_1..q_g with r_j = q_j(x) dx / (4y).

    q_j(x) = sum_{k=j}^{2g+1-j} (k + 1 - j) lam_{k+1+j} x^k.
    """
    g = curve.genus
    out = []
    for j in range(1, g + 1):
        q = np.zeros(2 * g + 2 - j, dtype=complex)
        for k in range(j, 2 * g + 2 - j):
            q[k] = (k + 1 - j) * curve.lam_at(k + 1 + j)
        out.append(q)
    return out


def differential_basis(curve: HyperellipticCurve, point: CurvePoint):
    """Values of the basis integrands at a point, as (first kind, second kind).

    First kind:   u_i = x^(i-1) dx / y,            i = 1..g
    Second kind:  r_j = q_j(x) dx / (4y),          j = 1..g

    Returns the two length-g arrays of dx-coefficients.  The second-kind
    basis has a pole only at infinity, of order matching the gap sequence.
    """
    x, y = point.x, point.y
    scale = 2.0 * (1.0 + abs(x)) ** (curve.genus + 0.5)
    if abs(y) < 1e-10 * scale:
        raise AtBranchPoint(f"y = {y:.3e} at x = {x:.6g}")
    g = curve.genus
    u = np.array([x ** (i - 1) / y for i in range(1, g + 1)], dtype=complex)
    r = np.array(
        [npoly.polyval(x, q) / (4 * y) for q in second_kind_numerators(curve)],
        dtype=complex,
    )
    return u, r


@dataclass(frozen=True)
class NSCurveShape:
    """Coefficient data of f(x, y) = y^n - sum_{m<n} a_m(x) y^m.

    ``coeff_polys`` holds the ascending coefficient tuples of a_0..a_{n-1}.
    """

    n: int
    s: int
    coeff_polys: tuple

    def a_poly(self, m: int) -> np.ndarray:
        return np.asarray(self.coeff_polys[m], dtype=complex)


def ns_shape(n: int, s: int, coeff_polys) -> NSCurveShape:
    if n < 2 or s <= n or math.gcd(n, s) != 1:
        raise InvalidPair(f"(n, s) = ({n}, {s}) needs 2 <= n < s and gcd 1")
    polys = tuple(tuple(complex(c) for c in p) for p in coeff_polys)
    if len(polys) != n:
        raise ValueError(f"need exactly n = {n} coefficient polynomials a_0..a_{n-1}")
    return NSCurveShape(n, s, polys)


def hyperelliptic_shape(curve: HyperellipticCurve) -> NSCurveShape:
    """The (2, 2g+1) shape of a hyperelliptic curve: a_1 = 0, a_0 = y^2 polynomial."""
    return NSCurveShape(2, 2 * curve.genus + 1, (tuple(curve.coeffs), (0.0 + 0.0j,)))


def psi_phi_vectors(shape: NSCurveShape, point: CurvePoint):
    """Polar decomposition vectors at a point.

    psi_k(x, y) = [f(x, y) / y^(n-k)]_+  (polynomial part), k = 0..n-1, and
    phi = (y^(n-1), ..., y, 1), satisfying

        phi(x, y)^T psi(x, Y) = (f(x, Y) - f(x, y)) / (Y - y).
    """
    n = shape.n
    x, y = point.x, point.y
    psi = np.zeros(n, dtype=complex)
    for k in range(n):
        v = y ** k
        for m in range(n - k, n):
            v -= npoly.polyval(x, shape.a_poly(m)) * y ** (m - (n - k))
        psi[k] = v
    phi = np.array([y ** (n - 1 - k) for k in range(n)], dtype=complex)
    return psi, phi


def shape_eval(shape: NSCurveShape, x, y):
    """Evaluate f(x, y) = y^n - sum a_m(x) y^m."""
    v = y ** shape.n
    for m in range(shape.n):
        v -= npoly.polyval(x, shape.a_poly(m)) * y ** m
    return v


def projective_T(shape: NSCurveShape, point: CurvePoint, yprime: complex, ydoubleprime: complex) -> complex:
    """Curve-dependent term of the projective connection, as a dx^2 coefficient.

    T = -(1 / (2 f_y)) [3 y'' f_yy + 2 y'^2 f_yyy + 6 y' f_yyx + 6 f_yxx]

    evaluated at the point with the supplied derivatives of y along the curve.
    """
    n = shape.n
    if n > 5:
        raise UnsupportedDegree(f"n = {n} > 5")
    x, y = point.x, point.y

    def a(m: int, dx: int = 0) -> complex:
        p = shape.a_poly(m)
        for _ in range(dx):
            p = npoly.polyder(p)
        return complex(npoly.polyval(x, p)) if len(p) else 0.0 + 0.0j

    f_y = n * y ** (n - 1) - sum(m * a(m) * y ** (m - 1) for m in range(1, n))
    f_yy = n * (n - 1) * y ** (n - 2) - sum(
        m * (m - 1) * a(m) * y ** (m - 2) for m in range(2, n)
    )
    f_yyy = n * (n - 1) * (n - 2) * y ** (n - 3) - sum(
        m * (m - 1) * (m - 2) * a(m) * y ** (m - 3) for m in range(3, n)
    )
    f_yyx = -sum(m * (m - 1) * a(m, 1) * y ** (m - 2) for m in range(2, n))
    f_yxx = -sum(m * a(m, 2) * y ** (m - 1) for m in range(1, n))
    if f_y == 0:
        raise AtBranchPoint(f"f_y = 0 at x = {x:.6g}")
    return -(3 * ydoubleprime * f_yy + 2 * yprime ** 2 * f_yyy + 6 * yprime * f_yyx + 6 * f_yxx) / (2 * f_y)
