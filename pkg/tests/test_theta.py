"""Theta oracle suite: brute-force sums, mpmath cross-check, derivative FD.

Every oracle here goes through routes the library does not use internally:
a literal double lattice sum, mpmath's jtheta, and numerical
differentiation of plain theta values.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secondkind import char, theta_eval, theta_table
from secondkind.theta import all_characteristics, half_period, theta_raw

BRUTE_RADIUS = 12


def brute_theta(z, tau, eps, eps_prime, radius=BRUTE_RADIUS):
    """Literal lattice sum, no recentring, no vectorization tricks."""
    g = len(eps)
    z = np.asarray(z, dtype=complex)
    total = 0.0 + 0.0j
    ranges = [range(-radius, radius + 1)] * g
    import itertools

    for n in itertools.product(*ranges):
        m = np.array(n, dtype=float) + np.asarray(eps, dtype=float)
        phase = 1j * math.pi * (m @ np.asarray(tau) @ m) + 2j * math.pi * (
            m @ (z + np.asarray(eps_prime))
        )
        total += np.exp(phase)
    return total


# ---------------------------------------------------------------- genus 1


def test_genus1_matches_mpmath(lemniscatic_bundle):
    # our theta[a;b](z; tau) against jtheta with q = exp(i pi tau):
    #   [1;1] -> -theta_1(pi z), [1;0] -> theta_2, [0;0] -> theta_3, [0;1] -> theta_4
    tau = complex(lemniscatic_bundle.tau[0, 0])
    q = mpmath.exp(1j * mpmath.pi * tau)
    pairing = {
        (1, 1): (1, -1.0),
        (1, 0): (2, 1.0),
        (0, 0): (3, 1.0),
        (0, 1): (4, 1.0),
    }
    for z in (0.0, 0.31 + 0.12j, -0.4 + 0.05j):
        for (a, b), (n, sgn) in pairing.items():
            ours = theta_eval(np.array([z]), lemniscatic_bundle.tau, char((a,), (b,)))
            ref = sgn * mpmath.jtheta(n, mpmath.pi * z, q)
            assert abs(ours - complex(ref)) < 1e-13 * max(1.0, abs(complex(ref)))


def test_genus1_derivatives_match_mpmath(lemniscatic_bundle):
    # z-derivatives pick up a factor pi per order under z -> pi z
    tau = complex(lemniscatic_bundle.tau[0, 0])
    q = mpmath.exp(1j * mpmath.pi * tau)
    odd = char((1,), (1,))
    z = 0.2 - 0.07j
    for k in (1, 2, 3):
        ours = theta_eval(np.array([z]), lemniscatic_bundle.tau, odd, deriv=(k,))
        ref = -(mpmath.pi**k) * mpmath.jtheta(1, mpmath.pi * z, q, derivative=k)
        assert abs(ours - complex(ref)) < 1e-11 * max(1.0, abs(complex(ref)))


# ---------------------------------------------------------------- genus 2


def test_brute_force_lattice_sum(standard_table):
    tau = standard_table.tau
    zs = [np.array([0.0, 0.0]), np.array([0.13 - 0.02j, -0.21 + 0.09j])]
    for ch in all_characteristics(2):
        for z in zs:
            ours = theta_eval(z, tau, ch, tol=1e-15)
            ref = brute_theta(z, tau, ch.eps, ch.eps_prime)
            assert abs(ours - ref) < 1e-14 * max(1.0, abs(ref)), ch.label()


def test_table_values_match_brute_force(skew_table):
    for ch in all_characteristics(2):
        ref = brute_theta(np.zeros(2), skew_table.tau, ch.eps, ch.eps_prime)
        assert abs(skew_table.value(ch) - ref) < 1e-13 * max(1.0, abs(ref))


# -------------------------------------------------- derivative oracles (FD)


def _dirk(f, v, k, r=0.35, n=32):
    """k-th derivative of t -> f(t v) at t = 0 from values on a circle."""
    js = np.arange(n)
    w = np.exp(2j * np.pi * js / n)
    vals = np.array([f(r * wj * np.asarray(v, dtype=complex)) for wj in w])
    return math.factorial(k) * np.sum(vals * w ** (-k)) / (n * r**k)


def _fd_gradient(f, g, h=0.01):
    # 6th-order central differences, one axis at a time
    weights = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
    out = np.zeros(g, dtype=complex)
    for i in range(g):
        e = np.zeros(g)
        e[i] = 1.0
        vals = np.array([f(s * h * e) for s in range(-3, 4)])
        out[i] = np.dot(weights, vals) / h
    return out


def test_gradient_against_central_differences(standard_table):
    tau = standard_table.tau
    for ch in standard_table.odd:
        ent = standard_table.entry(ch)

        def f(z, _ch=ch):
            return theta_eval(z, tau, _ch, tol=1e-15)

        fd = _fd_gradient(f, 2)
        scale = max(1.0, float(np.max(np.abs(ent.grad_arr()))))
        assert np.max(np.abs(fd - ent.grad_arr())) < 1e-8 * scale


def test_hessian_against_directional_values(skew_table):
    # D_v^2 theta = v^T H v for v in a frame of three directions
    tau = skew_table.tau
    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])]
    for ch in list(skew_table.even)[:4]:
        ent = skew_table.entry(ch)
        hess = ent.hess_arr()

        def f(z, _ch=ch):
            return theta_eval(z, tau, _ch, tol=1e-15)

        scale = max(1.0, float(np.max(np.abs(hess))))
        for v in dirs:
            got = _dirk(f, v, 2)
            want = v @ hess @ v
            assert abs(got - want) < 1e-8 * scale


def test_third_tensor_against_directional_values(standard_table):
    # four directional cubics determine the four independent components
    tau = standard_table.tau
    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
            np.array([1.0, 1.0]), np.array([1.0, -1.0])]
    for ch in standard_table.odd:
        ent = standard_table.entry(ch)
        third = ent.third_arr()

        def f(z, _ch=ch):
            return theta_eval(z, tau, _ch, tol=1e-15)

        scale = max(1.0, float(np.max(np.abs(third))))
        for v in dirs:
            got = _dirk(f, v, 3)
            want = np.einsum("ijk,i,j,k", third, v, v, v)
            assert abs(got - want) < 1e-8 * scale


def test_directional_table_is_winding_contraction(standard_table):
    u, v = (np.asarray(w, dtype=complex) for w in standard_table.winding)
    for ch in all_characteristics(2):
        ent = standard_table.entry(ch)
        grad, hess, third = ent.grad_arr(), ent.hess_arr(), ent.third_arr()
        assert abs(standard_table.D(ch, "1") - u @ grad) < 1e-12
        assert abs(standard_table.D(ch, "12") - u @ hess @ v) < 1e-12
        want = np.einsum("ijk,i,j,k", third, v, v, v)
        assert abs(standard_table.D(ch, "222") - want) < 1e-12


# ------------------------------------------------------- structural checks


def test_parity_counts():
    chars = all_characteristics(2)
    assert len(chars) == 16
    assert sum(1 for c in chars if c.is_odd) == 6


def test_odd_values_vanish_even_gradients_vanish(standard_table):
    mx = max(abs(standard_table.value(c)) for c in all_characteristics(2))
    for ch in standard_table.odd:
        assert abs(standard_table.value(ch)) < 1e-13 * mx
    for ch in standard_table.even:
        assert np.max(np.abs(standard_table.entry(ch).grad_arr())) < 1e-12 * mx


def test_parity_under_negation(skew_table):
    tau = skew_table.tau
    z = np.array([0.17 + 0.03j, -0.08 + 0.11j])
    for ch in all_characteristics(2):
        a = theta_eval(z, tau, ch)
        b = theta_eval(-z, tau, ch)
        sgn = -1.0 if ch.is_odd else 1.0
        assert abs(a - sgn * b) < 1e-12


def test_characteristic_shift_identities(skew_table):
    # integer shifts of the characteristic: lattice reindex and pure phase
    tau = skew_table.tau
    z = np.array([0.21 - 0.05j, 0.02 + 0.14j])
    eps = np.array([0.5, 0.0])
    epsp = np.array([0.5, 0.5])
    base, _ = theta_raw(z, tau, eps, epsp)
    top_shift, _ = theta_raw(z, tau, eps + np.array([1.0, 0.0]), epsp)
    assert abs(top_shift - base) < 1e-13
    bot_shift, _ = theta_raw(z, tau, eps, epsp + np.array([0.0, 1.0]))
    phase = np.exp(2j * np.pi * eps @ np.array([0.0, 1.0]))
    assert abs(bot_shift - phase * base) < 1e-13


def test_quasi_periodicity(standard_table):
    tau = standard_table.tau
    ch = char((1, 0), (1, 1))
    z = np.array([0.11 + 0.21j, -0.06 + 0.04j])
    base = theta_eval(z, tau, ch)

    m = np.array([1.0, -2.0])
    got = theta_eval(z + m, tau, ch)
    want = np.exp(2j * np.pi * ch.eps @ m) * base
    assert abs(got - want) < 1e-12

    q = np.array([1.0, 1.0])
    got = theta_eval(z + tau @ q, tau, ch)
    factor = np.exp(-1j * np.pi * q @ tau @ q - 2j * np.pi * q @ (z + ch.eps_prime))
    assert abs(got - factor * base) < 1e-11 * max(1.0, abs(factor * base))


def test_truncation_radius_honest(standard_bundle):
    # a loose tolerance must still deliver its promised accuracy
    loose = theta_table(standard_bundle, tol=1e-6)
    tight = theta_table(standard_bundle, tol=1e-15)
    for ch in all_characteristics(2):
        assert abs(loose.value(ch) - tight.value(ch)) < 1e-6


def test_half_period_definition(standard_table):
    tau = standard_table.tau
    ch = char((1, 1), (0, 1))
    want = tau @ np.array([0.5, 0.5]) + np.array([0.0, 0.5])
    np.testing.assert_allclose(half_period(ch, tau), want, atol=1e-15)


def test_char_xor_addition():
    from secondkind.theta import char_add

    a = char((1, 0), (1, 1))
    b = char((0, 1), (1, 0))
    c = char_add(a, b)
    assert c.top == (1, 1) and c.bottom == (0, 1)
    assert char_add(a, a).top == (0, 0)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=-0.4, max_value=0.4),
    st.floats(min_value=-0.3, max_value=0.3),
    st.floats(min_value=-0.4, max_value=0.4),
    st.floats(min_value=-0.3, max_value=0.3),
)
def test_parity_property_random_arguments(standard_table, a, b, c, d):
    z = np.array([a + 1j * b, c + 1j * d])
    ch = char((0, 1), (1, 1))
    lhs = theta_eval(z, standard_table.tau, ch)
    rhs = theta_eval(-z, standard_table.tau, ch)
    assert abs(lhs + rhs) < 1e-11 * max(1.0, abs(lhs))
