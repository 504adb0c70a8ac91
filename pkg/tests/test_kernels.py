import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from doiforge.errors import DomainError, InvalidParameter
from doiforge.functions import f_alpha, h_alpha, main_f, polynomial
from doiforge.kernels import (FACTORIZATIONS, chi0, chi1, constant, divided_difference,
                              factorization_residual, factorization_sides, left, mainf_kernel,
                              phi_prime, psi_f, psi_prime_alpha, psi_theta, psi_zero, right,
                              weak_lp_split)

reals = st.floats(-50, 50, allow_nan=False)
positives = st.floats(1e-3, 1e3)


def test_divided_difference_examples():
    f = main_f()
    assert divided_difference(f, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert divided_difference(f, 1.0, -1.0) == pytest.approx(0.7071067811865475, abs=1e-15)


@pytest.mark.parametrize("lam", [-3.0, -0.4, 0.0, 0.7, 5.0])
def test_near_diagonal_uses_derivative(lam):
    f = main_f()
    # Richardson-extrapolated central quotient at spacing 1e-3 as the oracle
    d = lambda h: (f(lam + h) - f(lam - h)) / (2 * h)
    oracle = (4 * d(5e-4) - d(1e-3)) / 3
    assert divided_difference(f, lam, lam + 1e-12) == pytest.approx(oracle, abs=1e-10)


def test_diagonal_threshold_boundary():
    f = polynomial([0.0, 0.0, 1.0])  # t^2, quotient is lam + mu on both branches
    for gap in (1e-9, 1e-7, 1e-5):
        assert divided_difference(f, 1.0, 1.0 + gap) == pytest.approx(2.0 + gap, abs=1e-8)


@given(reals, reals)
def test_mean_value_bound_and_symmetry(lam, mu):
    k = mainf_kernel()
    a, b = k(lam, mu), k(mu, lam)
    assert a == b
    assert abs(a) <= 1.0 + 1e-12


@given(reals, reals, st.floats(0.01, 100))
def test_psi_prime_alpha_bounds(lam, mu, alpha):
    v = psi_prime_alpha(alpha)(lam, mu)
    assert 0 < v <= 1 / (2 * alpha) * (1 + 1e-12)


@given(positives, positives, st.floats(0.01, 0.99))
def test_psi_theta_bound(lam, mu, theta):
    v = psi_theta(theta)(lam, mu)
    # sup over lam/mu is attained at lam/mu = (1 - theta)/theta
    assert 0 < v <= theta ** theta * (1 - theta) ** (1 - theta) * (1 + 1e-12)
    assert psi_theta(0.5)(lam, mu) <= 0.5 + 1e-12


@given(reals, reals)
def test_phi_prime_bound(lam, mu):
    v = phi_prime()(lam, mu)
    assert 0 < v <= 0.5 + 1e-12


def test_psi_zero_examples():
    assert psi_zero()(4.0, 1.0) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        psi_zero()(-1.0, 1.0)


def test_spec_factorization_examples():
    x = np.linspace(-5, 5, 200)
    lhs, _ = factorization_sides("falpha_resolution", 1.0, (x, x))
    assert factorization_residual("falpha_resolution", 1.0, (x, x)) <= 1e-10 * (1 + np.abs(lhs).max())
    y = np.linspace(0.05, 10, 200)
    assert factorization_residual("psi_zero_split", None, (y, y)) <= 1e-12
    z = np.exp(np.linspace(-3, 3, 200))
    lhs, _ = factorization_sides("power_split", 2.0, (z, z))
    assert factorization_residual("power_split", 2.0, (z, z)) <= 1e-9 * (1 + np.abs(lhs).max())


@pytest.mark.parametrize("kind", FACTORIZATIONS)
def test_every_factorization_default_grid(kind):
    lhs, _ = factorization_sides(kind)
    assert factorization_residual(kind) <= 1e-10 * (1 + np.abs(lhs).max())


@pytest.mark.parametrize("alpha", [0.1, 0.5, 2.0, 10.0])
def test_alpha_resolutions(alpha):
    for kind in ("falpha_resolution", "halpha_resolution"):
        lhs, _ = factorization_sides(kind, alpha)
        assert factorization_residual(kind, alpha) <= 1e-10 * (1 + np.abs(lhs).max())


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.75, 0.9])
def test_theta_split(theta):
    assert factorization_residual("psi_theta_split", theta) <= 1e-10


def test_bad_parameters():
    with pytest.raises(InvalidParameter):
        factorization_residual("nope")
    with pytest.raises(InvalidParameter):
        psi_prime_alpha(0.0)
    with pytest.raises(InvalidParameter):
        psi_theta(1.0)
    with pytest.raises(InvalidParameter):
        weak_lp_split(1.0)


@given(st.floats(-5, 5))
def test_cutoffs_partition_unity(t):
    assert chi0(t) + chi1(t) == pytest.approx(1.0, abs=1e-15)
    if abs(t) <= 1:
        assert chi0(t) == 1.0
    if abs(t) >= 2:
        assert chi0(t) == 0.0
    assert 0.0 <= chi0(t) <= 1.0


def test_split_parts_add_up():
    lam = np.exp(np.linspace(-3, 3, 41))[:, None]
    mu = np.ones((1, 5))
    full = weak_lp_split(2.0)(lam, mu)
    parts = weak_lp_split(2.0, "chi0")(lam, mu) + weak_lp_split(2.0, "chi1")(lam, mu)
    np.testing.assert_allclose(full, parts, atol=1e-15)


def test_algebra_and_adjoint():
    k = left(lambda t: t) * right(lambda t: t * t) + constant(2.0)
    assert k(3.0, 2.0) == pytest.approx(14.0)
    kc = constant(1j) * left(lambda t: t)
    assert kc.adjoint()(2.0, 5.0) == pytest.approx(np.conj(kc(5.0, 2.0)))


@pytest.mark.parametrize("f", [f_alpha(0.5), h_alpha(2.0), main_f()])
def test_divided_difference_symmetric(f):
    x = np.linspace(-4, 4, 31)
    M = psi_f(f).matrix(x, x)
    assert np.array_equal(M, M.T)
