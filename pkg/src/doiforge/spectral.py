"""Finite Hermitian operators and their spectral calculus.

The matrix trace plays the role of the trace on the von Neumann algebra, so
every operator here is a bounded finite-dimensional stand-in for ``D``,
``D_0``, ``Delta_alpha`` and friends.
"""
from __future__ import annotations

import logging
from functools import cached_property

import numpy as np

from . import _backend
from .errors import (ConvergenceFailure, DimensionMismatch, DomainError,
                     NonHermitianInput, NonPositiveAlpha)
from .functions import ScalarFunction

log = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-13


def _as_square(x) -> np.ndarray:
    a = np.array(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonHermitianInput("matrix has non-finite entries")
    return a


class HermitianOperator:
    """Hermitian matrix with a lazily computed, cached eigendecomposition.

    Inputs within ``1e-12 * (1 + max|entry|)`` of Hermitian are symmetrized;
    anything further off raises :class:`NonHermitianInput`.
    """

    def __init__(self, entries, *, _eig=None):
        a = _as_square(entries)
        dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
        scale = 1.0 + (float(np.max(np.abs(a))) if a.size else 0.0)
        if dev > HERMITICITY_TOL * scale:
            raise NonHermitianInput(
                f"max |A - A*| = {dev:.3e} exceeds {HERMITICITY_TOL:g} * {scale:.3e}")
        if dev > 0.0:
            log.debug("symmetrizing input, hermiticity deviation %.3e", dev)
            a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self.entries = a
        self.hermiticity_deviation = dev
        if _eig is not None:
            self.__dict__["_eig"] = _eig

    @classmethod
    def from_eig(cls, values, vectors) -> "HermitianOperator":
        """Build ``U diag(values) U*`` and keep the decomposition cached."""
        values = np.asarray(values, dtype=float)
        U = np.asarray(vectors, dtype=np.complex128)
        order = np.argsort(values, kind="stable")
        values, U = values[order], U[:, order]
        mat = (U * values) @ U.conj().T
        mat = 0.5 * (mat + mat.conj().T)
        values.setflags(write=False)
        U.setflags(write=False)
        return cls(mat, _eig=(values, U))

    @classmethod
    def diag(cls, values) -> "HermitianOperator":
        values = np.asarray(values, dtype=float)
        return cls.from_eig(values, np.eye(values.shape[0]))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def _eig(self):
        w, U = _eigh(self.entries)
        w.setflags(write=False)
        U.setflags(write=False)
        return w, U

    @property
    def spectrum(self) -> np.ndarray:
        return self._eig[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig[1]

    @property
    def norm(self) -> float:
        """Operator norm."""
        w = self.spectrum
        return float(max(abs(w[0]), abs(w[-1]))) if w.size else 0.0

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_operator(x) -> HermitianOperator:
    return x if isinstance(x, HermitianOperator) else HermitianOperator(x)


def _eigh(a: np.ndarray):
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    w, V, sweeps, off, target = _backend.jacobi_eigh(a, MAX_SWEEPS, OFFDIAG_TOL)
    if off > target:
        raise ConvergenceFailure(
            f"Jacobi stopped after {sweeps} sweeps with off-diagonal norm {off:.3e} "
            f"(target {target:.3e}, n={n})")
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order])


def decompose(A):
    """Return ``(spectrum, U)`` with ``A = U diag(spectrum) U*``, spectrum ascending."""
    A = as_operator(A)
    return A.spectrum, A.eigenvectors


def apply_function(f: ScalarFunction, A):
    """Spectral calculus ``f(A) = U diag(f(lambda_i)) U*``.

    Real-valued families return a :class:`HermitianOperator`; ``ImagPower``
    returns the unitary as a plain complex array.
    """
    A = as_operator(A)
    w, U = A.spectrum, A.eigenvectors
    if f.family == "Sign":
        zero_tol = 1e-14 * max(1.0, A.norm)
        if np.any(np.abs(w) <= zero_tol):
            raise DomainError("Sign applied to an operator with a zero eigenvalue")
        w = np.where(np.abs(w) <= zero_tol, 1.0, w)
    vals = f(w)
    if not f.is_real:
        return (U * vals) @ U.conj().T
    return HermitianOperator.from_eig(np.real(vals), U)


def delta(A, alpha: float) -> HermitianOperator:
    """``(alpha^2 + A^2)^(1/2)``."""
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    A = as_operator(A)
    return HermitianOperator.from_eig(np.hypot(alpha, A.spectrum), A.eigenvectors)


def power(A, exponent: float) -> HermitianOperator:
    """Real power of a positive definite operator."""
    A = as_operator(A)
    w = A.spectrum
    if w.size and w[0] <= 0.0:
        raise DomainError("power() requires a positive definite operator")
    return HermitianOperator.from_eig(w ** exponent, A.eigenvectors)


def commutator(X, Y) -> np.ndarray:
    """``XY - YX``."""
    X = np.asarray(X, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    if X.shape != Y.shape or X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"commutator of shapes {X.shape} and {Y.shape}")
    return X @ Y - Y @ X


def reconstruction_residual(A) -> float:
    A = as_operator(A)
    w, U = A.spectrum, A.eigenvectors
    return float(np.linalg.norm((U * w) @ U.conj().T - A.entries, 2))
