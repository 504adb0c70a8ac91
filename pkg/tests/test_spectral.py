import numpy as np
import pytest
from hypothesis import given, strategies as st

from doiforge.errors import DimensionMismatch, DomainError, NonHermitianInput, NonPositiveAlpha
from doiforge.functions import (f_alpha, h_alpha, imag_power, main_f, polynomial, power_one_minus_r,
                                quarter_power, sign)
from doiforge.spectral import (HermitianOperator, apply_function, commutator, decompose, delta,
                               power, reconstruction_residual)

from conftest import random_hermitian, random_unitary


def test_diagonal_input_sorted_with_permutation_vectors():
    w, U = decompose(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_allclose(w, [-1, 2, 3], atol=1e-14)
    np.testing.assert_allclose(np.abs(U), np.eye(3)[:, [1, 2, 0]], atol=1e-14)


def test_pauli_x():
    w, _ = decompose([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 6, 16, 32])
def test_matches_lapack_and_reconstructs(rng, n):
    A = random_hermitian(rng, n)
    op = HermitianOperator(A)
    np.testing.assert_allclose(op.spectrum, np.linalg.eigvalsh(A), atol=1e-10 * (1 + op.norm))
    U = op.eigenvectors
    assert np.linalg.norm(U.conj().T @ U - np.eye(n), 2) <= 1e-10
    assert reconstruction_residual(op) <= 1e-9 * (1 + op.norm)


def test_decomposition_is_deterministic(rng):
    A = random_hermitian(rng, 7)
    w1, U1 = decompose(A)
    w2, U2 = decompose(A.copy())
    assert np.array_equal(w1, w2) and np.array_equal(U1, U2)


def test_hermiticity_tolerance():
    a = np.array([[1.0, 2.0], [2.0 + 1e-13, 1.0]])
    op = HermitianOperator(a)
    assert op.hermiticity_deviation > 0
    assert np.array_equal(op.entries, op.entries.conj().T)
    with pytest.raises(NonHermitianInput):
        HermitianOperator([[1.0, 2.0], [2.1, 1.0]])
    with pytest.raises(DimensionMismatch):
        HermitianOperator(np.zeros((2, 3)))
    with pytest.raises(NonHermitianInput):
        HermitianOperator([[np.nan, 0], [0, 1]])


def test_repeated_eigenvalues(rng):
    U = random_unitary(rng, 5)
    A = (U * np.array([1.0, 1.0, 1.0, -2.0, -2.0])) @ U.conj().T
    op = HermitianOperator(A)
    np.testing.assert_allclose(op.spectrum, [-2, -2, 1, 1, 1], atol=1e-12)
    assert reconstruction_residual(op) <= 1e-12


def test_apply_function_examples():
    z = apply_function(main_f(), np.zeros((3, 3)))
    assert np.array_equal(z.entries, np.zeros((3, 3)))
    m = apply_function(main_f(), np.diag([1.0, -1.0]))
    np.testing.assert_allclose(np.diag(m.entries).real, [0.7071067811865475, -0.7071067811865475], rtol=1e-15)
    h = apply_function(h_alpha(1.0), np.diag([0.0]))
    assert h.entries[0, 0] == 1.0


def test_sign_at_zero_is_domain_error():
    with pytest.raises(DomainError):
        apply_function(sign(), np.diag([0.0, 1.0]))


def test_imag_power_is_unitary(rng):
    A = random_hermitian(rng, 5)
    W = apply_function(imag_power(0.7), A)
    assert isinstance(W, np.ndarray)
    assert np.linalg.norm(W.conj().T @ W - np.eye(5), 2) <= 1e-12


@pytest.mark.parametrize("f", [main_f(), f_alpha(0.3), h_alpha(2.0), quarter_power(), sign()])
def test_function_commutes_with_argument(rng, f):
    A = HermitianOperator(random_hermitian(rng, 6))
    F = apply_function(f, A).entries
    assert np.linalg.norm(commutator(F, A.entries), 2) <= 1e-10 * (1 + A.norm)


def test_power_requires_positive(rng):
    A = HermitianOperator(random_hermitian(rng, 4))
    with pytest.raises(DomainError):
        power(A, 0.5)
    P = delta(A, 1.0)
    np.testing.assert_allclose(power(P, 2.0).entries, np.eye(4) + A.entries @ A.entries, atol=1e-10)
    with pytest.raises(DomainError):
        apply_function(power_one_minus_r(2.0), A)


def test_delta_examples():
    assert delta(np.diag([0.0]), 2.0).entries[0, 0] == 2.0
    np.testing.assert_allclose(np.diag(delta(np.diag([1.0, -1.0]), 1.0).entries).real, [2 ** 0.5] * 2)
    with pytest.raises(NonPositiveAlpha):
        delta(np.eye(2), 0.0)


@given(st.integers(1, 8), st.floats(0.05, 20), st.integers(0, 2 ** 32 - 1))
def test_delta_properties(n, alpha, seed):
    rng = np.random.default_rng(seed)
    A = HermitianOperator(random_hermitian(rng, n, 3.0))
    Dl = delta(A, alpha)
    sq = Dl.entries @ Dl.entries
    target = alpha ** 2 * np.eye(n) + A.entries @ A.entries
    assert np.linalg.norm(sq - target, 2) <= 1e-9 * (1 + np.linalg.norm(target, 2))
    assert Dl.spectrum[0] >= alpha * (1 - 1e-12)
    inv = np.linalg.inv(Dl.entries)
    assert np.linalg.norm(inv, 2) <= 1 / alpha * (1 + 1e-9)
    assert np.linalg.norm(A.entries @ inv, 2) <= 1 + 1e-9
    inv2 = inv @ inv
    assert np.linalg.norm(inv2 - np.linalg.inv(target), 2) <= 1e-9 * (1 + np.linalg.norm(inv2, 2))


@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_calculus_is_multiplicative(n, seed):
    rng = np.random.default_rng(seed)
    A = HermitianOperator(random_hermitian(rng, n))
    p = rng.standard_normal(3)
    q = rng.standard_normal(3)
    pq = np.polynomial.polynomial.polymul(p, q)
    lhs = apply_function(polynomial(pq), A).entries
    rhs = apply_function(polynomial(p), A).entries @ apply_function(polynomial(q), A).entries
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-9 * (1 + np.linalg.norm(rhs, 2))


@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_unitary_equivariance(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n)
    W = random_unitary(rng, n)
    lhs = apply_function(main_f(), W @ A @ W.conj().T).entries
    rhs = W @ apply_function(main_f(), A).entries @ W.conj().T
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-9


def test_commutator_examples(rng):
    c = commutator(np.diag([1.0, -1.0]), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(c, [[0, 2], [-2, 0]])
    X = random_hermitian(rng, 4)
    assert np.abs(commutator(X, X)).max() == 0
    assert np.abs(commutator(X, np.eye(4))).max() <= 1e-15
    Y = random_hermitian(rng, 4)
    np.testing.assert_allclose(commutator(X, Y), -commutator(Y, X))
    with pytest.raises(DimensionMismatch):
        commutator(np.eye(2), np.eye(3))
