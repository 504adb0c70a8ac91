"""Double operator integrals as Schur multipliers in two eigenbases."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch
from .functions import ScalarFunction
from .kernels import Kernel, custom as custom_kernel, psi_f
from .report import EstimateReport
from .spectral import HermitianOperator, as_operator

IDENTITY_RTOL = 1e-9
BRUTE_FORCE_MAX_DIM = 8


@dataclass(frozen=True)
class DoiOperator:
    """``x -> U (Phi * (U* x V)) V*`` with ``D0 = U diag(lam) U*`` and ``D1 = V diag(mu) V*``."""

    kernel: Kernel
    left: HermitianOperator
    right: HermitianOperator

    def __post_init__(self):
        object.__setattr__(self, "left", as_operator(self.left))
        object.__setattr__(self, "right", as_operator(self.right))

    @cached_property
    def schur_matrix(self) -> np.ndarray:
        m = np.asarray(self.kernel.matrix(self.left.spectrum, self.right.spectrum))
        if not np.all(np.isfinite(m)):
            raise ValueError(f"kernel {self.kernel.label} is not finite on the spectra")
        m.setflags(write=False)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return self.left.dim, self.right.dim

    def __call__(self, x) -> np.ndarray:
        return schur_apply(self, x)


def doi(kernel: Kernel, D0, D1=None) -> DoiOperator:
    return DoiOperator(kernel, D0, D0 if D1 is None else D1)


def schur_apply(T: DoiOperator, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != T.shape:
        raise DimensionMismatch(f"operand shape {x.shape} does not match {T.shape}")
    U = T.left.eigenvectors
    V = T.right.eigenvectors
    return U @ (T.schur_matrix * (U.conj().T @ x @ V)) @ V.conj().T


def _random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def spectral_projections(A: HermitianOperator, rtol: float = 1e-10):
    """Distinct eigenvalues and the orthogonal projections onto their eigenspaces.

    Eigenvalues closer than ``rtol * (1 + ||A||)`` are merged into one cluster
    represented by its mean.
    """
    w, U = A.spectrum, A.eigenvectors
    if w.size == 0:
        return np.zeros(0), []
    tol = rtol * (1.0 + A.norm)
    starts = [0] + [k for k in range(1, w.size) if w[k] - w[k - 1] > tol]
    bounds = starts + [w.size]
    values, projs = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        values.append(float(np.mean(w[a:b])))
        Uc = U[:, a:b]
        projs.append(Uc @ Uc.conj().T)
    return np.array(values), projs


def trace_pairing_sum(kernel: Kernel, D0, D1, x, y) -> tuple[complex, float]:
    """``sum_ij phi(lam_i, mu_j) tr(x P_i y Q_j)`` over spectral projections.

    Returns the sum and ``sum_ij |phi| |tr(...)|`` as its natural scale.
    """
    lam, P = spectral_projections(as_operator(D0))
    mu, Q = spectral_projections(as_operator(D1))
    total, scale = 0.0 + 0.0j, 0.0
    for i, Pi in enumerate(P):
        xPy = x @ Pi @ y
        for j, Qj in enumerate(Q):
            tr = np.sum(xPy * Qj.T)
            phi = complex(kernel.evaluate(lam[i], mu[j]))
            total += phi * tr
            scale += abs(phi) * abs(tr)
    return total, scale


def defining_identity_check(T: DoiOperator, trials: int = 1, rng=None) -> EstimateReport:
    """Compare ``tr(x T(y))`` with the spectral double sum on random ``x, y``."""
    n = T.left.dim
    if n > BRUTE_FORCE_MAX_DIM:
        raise DimensionMismatch(f"brute force limited to n <= {BRUTE_FORCE_MAX_DIM}, got {n}")
    rng = np.random.default_rng(0) if rng is None else rng
    worst_dev, worst_scale, worst_ratio = 0.0, 1.0, -1.0
    for _ in range(trials):
        x = _random_matrix(rng, n)
        y = _random_matrix(rng, n)
        direct = np.trace(x @ schur_apply(T, y))
        brute, scale = trace_pairing_sum(T.kernel, T.left, T.right, x, y)
        dev = abs(direct - brute)
        scale = 1.0 + scale
        if dev / scale > worst_ratio:
            worst_dev, worst_scale, worst_ratio = dev, scale, dev / scale
    return EstimateReport.build(
        "doi_identity", worst_dev, worst_scale, IDENTITY_RTOL, tol=0.0,
        params={"n": n, "kernel": T.kernel.label, "trials": trials},
        notes="max |tr(x T(y)) - spectral double sum| over trials")


def _law_report(theorem_id, residuals: dict, scale: float, params: dict) -> EstimateReport:
    worst = max(residuals.values())
    return EstimateReport.build(theorem_id, worst, scale, IDENTITY_RTOL, tol=0.0,
                                params=params, extras={"residuals": residuals})


def homomorphism_check(phi1: Kernel, phi2: Kernel, D0, D1, x) -> EstimateReport:
    """Product, sum and adjoint laws of the Schur multiplier calculus."""
    D0, D1 = as_operator(D0), as_operator(D1)
    x = np.asarray(x, dtype=np.complex128)
    T1, T2 = DoiOperator(phi1, D0, D1), DoiOperator(phi2, D0, D1)
    t1x, t2x = T1(x), T2(x)
    prod = DoiOperator(phi1 * phi2, D0, D1)(x)
    summ = DoiOperator(phi1 + phi2, D0, D1)(x)
    adj = DoiOperator(phi1.adjoint(), D1, D0)(x.conj().T)
    residuals = {
        "product": float(np.max(np.abs(prod - T1(t2x)), initial=0.0)),
        "sum": float(np.max(np.abs(summ - (t1x + t2x)), initial=0.0)),
        "adjoint": float(np.max(np.abs(adj - t1x.conj().T), initial=0.0)),
    }
    bound = max(np.abs(T1.schur_matrix).max(initial=0.0), 1.0) * max(
        np.abs(T2.schur_matrix).max(initial=0.0), 1.0)
    scale = 1.0 + bound * float(np.linalg.norm(x, 2)) * max(1, D0.dim)
    return _law_report("doi_homomorphism", residuals, scale,
                       {"n": D0.dim, "phi1": phi1.label, "phi2": phi2.label})


def _eval_f(f, D: HermitianOperator):
    w, U = D.spectrum, D.eigenvectors
    return (U * f(w)) @ U.conj().T, f(w)


def change_of_variables_check(phi: Kernel, f0: ScalarFunction, f1: ScalarFunction,
                              D0, D1, x) -> EstimateReport:
    """``T_{phi(f0, f1)}(D0, D1) = T_phi(f0(D0), f1(D1))``."""
    D0, D1 = as_operator(D0), as_operator(D1)
    x = np.asarray(x, dtype=np.complex128)
    f0.check_domain(D0.spectrum)
    f1.check_domain(D1.spectrum)
    pulled = custom_kernel(f"{phi.label}({f0.label}, {f1.label})",
                           lambda lam, mu: phi.evaluate(np.real(f0(lam)), np.real(f1(mu))))
    lhs = DoiOperator(pulled, D0, D1)(x)
    F0 = HermitianOperator(_eval_f(f0, D0)[0])
    F1 = HermitianOperator(_eval_f(f1, D1)[0])
    T = DoiOperator(phi, F0, F1)
    rhs = T(x)
    res = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = 1.0 + max(np.abs(T.schur_matrix).max(initial=0.0), 1.0) * float(np.linalg.norm(x, 2)) * D0.dim
    return _law_report("doi_change_of_variables", {"change_of_variables": res}, scale,
                       {"n": D0.dim, "kernel": phi.label, "f0": f0.label, "f1": f1.label})


def commutator_transfer_check(f: ScalarFunction, fprime: ScalarFunction | None, D0, D1, a) -> EstimateReport:
    """``f(D0) a - a f(D1) = T_{psi_f}(D0, D1)(D0 a - a D1)``, exact for matrices."""
    D0, D1 = as_operator(D0), as_operator(D1)
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (D0.dim, D1.dim):
        raise DimensionMismatch(f"a has shape {a.shape}, expected {(D0.dim, D1.dim)}")
    fD0, _ = _eval_f(f, D0)
    fD1, _ = _eval_f(f, D1)
    lhs = fD0 @ a - a @ fD1
    T = DoiOperator(psi_f(f, fprime), D0, D1)
    rhs = T(D0.entries @ a - a @ D1.entries)
    res = float(np.linalg.norm(lhs - rhs, 2))
    sup_fprime = float(np.abs(T.schur_matrix).max(initial=0.0))
    scale = 1.0 + float(np.linalg.norm(a, 2)) * sup_fprime
    return EstimateReport.build(
        "thm3_transfer", res, scale, IDENTITY_RTOL, tol=0.0,
        params={"n": D0.dim, "f": f.label},
        notes="operator-norm residual of the commutator transfer identity",
        extras={"lhs_norm": float(np.linalg.norm(lhs, 2)), "a_norm": float(np.linalg.norm(a, 2))})


def multiplier_norm_estimate(T: DoiOperator, trials: int = 20, rng=None, power_steps: int = 30) -> float:
    """Lower estimate of ``||T||`` on the operator norm.

    Starts from random unitaries and improves by ascending ``x -> polar(T*(y))``,
    which is a standard power-type iteration for the multiplier norm.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = T.left.dim
    Tadj = DoiOperator(T.kernel.adjoint(), T.right, T.left)
    best = 0.0
    for _ in range(trials):
        q, _ = np.linalg.qr(_random_matrix(rng, n))
        x = q
        for _ in range(power_steps):
            y = T(x)
            best = max(best, float(np.linalg.norm(y, 2)))
            u, _, vh = np.linalg.svd(y)
            # dual step: the maximizing direction of <T(x), w> over unitary x
            z = Tadj(u @ vh)
            u2, _, vh2 = np.linalg.svd(z)
            x = u2 @ vh2
        best = max(best, float(np.linalg.norm(T(x), 2)))
    return best
