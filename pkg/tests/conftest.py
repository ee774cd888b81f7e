"""Session fixtures: two worked curves per genus with their full pipelines."""

import numpy as np
import pytest

from secondkind import (
    bolza_match,
    compute_periods,
    curve_from_branch_points,
    curve_from_coefficients,
    theta_table,
)

# genus 2 with real symmetric branch points; lam = (0, 16, 0, -20, 0)
STANDARD_POINTS = (-2.0, -1.0, 0.0, 1.0, 2.0)

# genus 2 with generic complex branch points, no accidental symmetry
SKEW_POINTS = (-1.7 + 0.4j, -0.6 - 0.9j, 0.2 + 0.8j, 1.1 - 0.3j, 1.8 + 0.6j)

# genus 1: y^2 = 4x^3 - 4x, the lemniscatic curve (tau = i exactly)
LEMNISCATIC_LAM = (0.0, -4.0, 0.0)

GENERIC_G1_POINTS = (-1.3 + 0.2j, 0.5 - 0.1j, 0.9 - 0.3j)


@pytest.fixture(scope="session")
def standard_curve():
    return curve_from_branch_points(STANDARD_POINTS)


@pytest.fixture(scope="session")
def standard_bundle(standard_curve):
    return compute_periods(standard_curve)


@pytest.fixture(scope="session")
def standard_table(standard_bundle):
    return theta_table(standard_bundle)


@pytest.fixture(scope="session")
def standard_matching(standard_table, standard_curve):
    return bolza_match(standard_table, standard_curve)


@pytest.fixture(scope="session")
def skew_curve():
    return curve_from_branch_points(SKEW_POINTS)


@pytest.fixture(scope="session")
def skew_bundle(skew_curve):
    return compute_periods(skew_curve)


@pytest.fixture(scope="session")
def skew_table(skew_bundle):
    return theta_table(skew_bundle)


@pytest.fixture(scope="session")
def skew_matching(skew_table, skew_curve):
    return bolza_match(skew_table, skew_curve)


@pytest.fixture(scope="session")
def lemniscatic_curve():
    return curve_from_coefficients(LEMNISCATIC_LAM)


@pytest.fixture(scope="session")
def lemniscatic_bundle(lemniscatic_curve):
    return compute_periods(lemniscatic_curve)


@pytest.fixture(scope="session")
def lemniscatic_table(lemniscatic_bundle):
    return theta_table(lemniscatic_bundle)


@pytest.fixture(scope="session")
def generic_g1_curve():
    return curve_from_branch_points(GENERIC_G1_POINTS)


@pytest.fixture(scope="session")
def generic_g1_bundle(generic_g1_curve):
    return compute_periods(generic_g1_curve)


@pytest.fixture(scope="session")
def generic_g1_table(generic_g1_bundle):
    return theta_table(generic_g1_bundle)


def assert_small(value, tol, what=""):
    value = float(abs(value))
    assert value < tol, f"{what or 'value'} = {value:.3e} exceeds {tol:.1e}"


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260819)
