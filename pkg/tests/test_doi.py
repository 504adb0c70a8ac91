import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from doiforge.doi import (BRUTE_FORCE_MAX_DIM, DoiOperator, change_of_variables_check,
                          commutator_transfer_check, defining_identity_check, doi,
                          homomorphism_check, multiplier_norm_estimate, schur_apply, trace_pairing_sum)
from doiforge.errors import DimensionMismatch, DomainError
from doiforge.fourier import fourier_profile
from doiforge.functions import custom, f_alpha, h_alpha, main_f, polynomial, power_one_minus_r
from doiforge.kernels import (constant, left, mainf_kernel, psi_prime_alpha, psi_theta, psi_zero, right)
from doiforge.spectral import HermitianOperator, apply_function, delta

from conftest import random_hermitian, random_matrix, random_unitary

D2 = np.diag([1.0, -1.0])


def _positive(rng, n):
    X = random_matrix(rng, n)
    return X @ X.conj().T + 0.1 * np.eye(n)


def test_identity_multiplier(rng):
    x = random_matrix(rng, 5)
    A = random_hermitian(rng, 5)
    np.testing.assert_allclose(schur_apply(doi(constant(1.0), A), x), x, atol=1e-12)


def test_left_and_right_multipliers(rng):
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    x = random_matrix(rng, 4)
    fA = apply_function(main_f(), A).entries
    fB = apply_function(main_f(), B).entries
    np.testing.assert_allclose(doi(left(main_f()), A, B)(x), fA @ x, atol=1e-12)
    np.testing.assert_allclose(doi(right(main_f()), A, B)(x), x @ fB, atol=1e-12)


def test_two_by_two_schur_example():
    out = schur_apply(doi(mainf_kernel(), D2), np.array([[0, 2], [-2, 0]]))
    c = 2 * 0.7071067811865475
    np.testing.assert_allclose(out, [[0, c], [-c, 0]], atol=1e-15)


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        schur_apply(doi(constant(1.0), np.eye(2)), np.eye(3))


def test_identity_two_by_two_hand_expansion():
    k = psi_prime_alpha(1.0)
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    y = np.array([[0.5, -1.0], [2.0, 1.5]])
    lam = [1.0, -1.0]
    # P_i, Q_j are coordinate projections, tr(x P_i y Q_j) = x[j, i] y[i, j]
    hand = sum(k(lam[i], lam[j]) * x[j, i] * y[i, j] for i in range(2) for j in range(2))
    brute, _ = trace_pairing_sum(k, D2, D2, x, y)
    assert abs(brute - hand) <= 1e-12
    assert abs(np.trace(x @ doi(k, D2)(y)) - hand) <= 1e-12


def test_identity_constant_kernel(rng):
    A = random_hermitian(rng, 5)
    x, y = random_matrix(rng, 5), random_matrix(rng, 5)
    brute, _ = trace_pairing_sum(constant(3.0), A, A, x, y)
    assert abs(brute - 3.0 * np.trace(x @ y)) <= 1e-10


@pytest.mark.parametrize("kernel", [psi_prime_alpha(0.7), mainf_kernel(), constant(2 - 1j)],
                         ids=lambda k: k.label)
def test_defining_identity_random(rng, kernel):
    A, B = random_hermitian(rng, 6), random_hermitian(rng, 6)
    rep = defining_identity_check(doi(kernel, A, B), trials=5, rng=rng)
    assert rep.passed and rep.theorem_id == "doi_identity"


def test_defining_identity_degenerate(rng):
    U = random_unitary(rng, 6)
    A = (U * np.array([1, 1, 1, 2, 2, -3.0])) @ U.conj().T
    assert defining_identity_check(doi(mainf_kernel(), A), trials=3, rng=rng).passed


def test_brute_force_size_cap(rng):
    A = random_hermitian(rng, BRUTE_FORCE_MAX_DIM + 1)
    with pytest.raises(DimensionMismatch):
        defining_identity_check(doi(constant(1.0), A))


def test_homomorphism_examples(rng):
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    x = random_matrix(rng, 4)
    k = left(main_f()) * right(h_alpha(1.0))
    expected = apply_function(main_f(), A).entries @ x @ apply_function(h_alpha(1.0), B).entries
    np.testing.assert_allclose(doi(k, A, B)(x), expected, atol=1e-12)
    rep = homomorphism_check(mainf_kernel(), constant(1.0), A, B, x)
    assert rep.passed
    P, Q = _positive(rng, 5), _positive(rng, 5)
    assert homomorphism_check(psi_prime_alpha(1.0), psi_zero(), P, Q, random_matrix(rng, 5)).passed


@given(st.integers(1, 7), st.integers(0, 2 ** 32 - 1))
def test_laws_property(n, seed):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(rng, n), random_hermitian(rng, n)
    k1 = mainf_kernel() * constant(1 + 2j)
    rep = homomorphism_check(k1, psi_prime_alpha(0.5), A, B, random_matrix(rng, n))
    assert rep.passed, rep.extras


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1), st.complex_numbers(max_magnitude=5))
def test_linearity(n, seed, c):
    rng = np.random.default_rng(seed)
    T = doi(mainf_kernel(), random_hermitian(rng, n), random_hermitian(rng, n))
    x, y = random_matrix(rng, n), random_matrix(rng, n)
    np.testing.assert_allclose(T(x + c * y), T(x) + c * T(y), atol=1e-10 * (1 + abs(c)) * n)


def test_change_of_variables_examples(rng):
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    x = random_matrix(rng, 4)
    ident = polynomial([0.0, 1.0])
    assert change_of_variables_check(mainf_kernel(), ident, ident, A, B, x).passed
    sq = polynomial([0.0, 0.0, 1.0])
    d = np.diag([1.0, -2.0, 0.5])
    k = psi_prime_alpha(1.0)
    xx = random_matrix(rng, 3)
    expected = k.matrix(np.diag(d) ** 2, np.diag(d) ** 2) * xx
    pulled = doi(k, apply_function(sq, d))(xx)
    np.testing.assert_allclose(pulled, expected, atol=1e-12)
    assert change_of_variables_check(k, sq, sq, d, d, xx).passed


def test_change_of_variables_log(rng):
    # psi_theta is a function of log(lam) - log(mu); pull it back through exp
    D0, D1 = delta(random_hermitian(rng, 5), 0.5), delta(random_hermitian(rng, 5), 2.0)
    log = custom("log", np.log, np.reciprocal)
    exp = custom("exp", np.exp, np.exp)
    L0 = HermitianOperator(apply_function(log, D0).entries)
    L1 = HermitianOperator(apply_function(log, D1).entries)
    rep = change_of_variables_check(psi_theta(0.3), exp, exp, L0, L1, random_matrix(rng, 5))
    assert rep.passed


def test_change_of_variables_domain_error(rng):
    p = power_one_minus_r(2.0)
    with pytest.raises(DomainError):
        change_of_variables_check(constant(1.0), p, p, -np.eye(2), np.eye(2), np.eye(2))


def test_transfer_examples(rng):
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    rep = commutator_transfer_check(main_f(), None, D2, D2, a)
    assert rep.passed and rep.lhs <= 1e-15
    f = apply_function(main_f(), D2).entries
    np.testing.assert_allclose(f @ a - a @ f, [[0, math.sqrt(2)], [-math.sqrt(2), 0]], atol=1e-15)
    A, B = random_hermitian(rng, 5), random_hermitian(rng, 5)
    assert commutator_transfer_check(main_f(), None, A, B, np.eye(5)).passed
    assert commutator_transfer_check(h_alpha(1.0), None, *(random_hermitian(rng, 8) for _ in range(2)),
                                     random_matrix(rng, 8)).passed


@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1), st.sampled_from([0.1, 1.0, 10.0]))
def test_transfer_exact(n, seed, alpha):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(rng, n, 3.0), random_hermitian(rng, n, 3.0)
    a = random_matrix(rng, n)
    for f in (main_f(), f_alpha(alpha), h_alpha(alpha)):
        rep = commutator_transfer_check(f, None, A, B, a)
        scale = 1 + np.linalg.norm(a, 2) * np.abs(doi(mainf_kernel(), A, B).schur_matrix).max()
        assert rep.passed
        assert rep.lhs <= 1e-9 * max(scale, rep.rhs)


def test_degenerate_basis_rotation(rng):
    vals = np.array([2.0, 2.0, 2.0, -1.0, -1.0, 0.5])
    U = random_unitary(rng, 6)
    A = (U * vals) @ U.conj().T
    # rotate inside each eigenspace
    R = np.eye(6, dtype=complex)
    R[:3, :3] = random_unitary(rng, 3)
    R[3:5, 3:5] = random_unitary(rng, 2)
    A_rot = (U @ R * vals) @ (U @ R).conj().T
    x = random_matrix(rng, 6)
    out1 = doi(mainf_kernel(), A)(x)
    out2 = doi(mainf_kernel(), A_rot)(x)
    assert np.max(np.abs(out1 - out2)) <= 1e-9


@pytest.mark.parametrize("theta", [0.5, 0.2])
def test_multiplier_norm_below_profile_bound(rng, theta):
    prof = fourier_profile("ThetaExp", (theta,))
    D0, D1 = _positive(rng, 6), _positive(rng, 6)
    T = doi(psi_theta(theta), D0, D1)
    est = multiplier_norm_estimate(T, trials=5, rng=rng)
    assert est <= prof.multiplier_bound + 1e-6
    assert est > 0


def test_schur_matrix_finite():
    with pytest.raises(ValueError):
        DoiOperator(psi_zero(), np.diag([0.0, 1.0]), np.diag([0.0, 1.0])).schur_matrix
