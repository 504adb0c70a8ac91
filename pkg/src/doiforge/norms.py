"""Singular values and the symmetric norms used by the estimates.

Under the counting trace the generalized singular value function of a matrix
is the step function ``t -> s_{floor(t)+1}``, so every norm here is computed
from the sorted singular values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, NonPositiveFactor
from .report import EstimateReport
from .spectral import HermitianOperator, _eigh

INEQ_TOL = 1e-9

_KIND_ALIASES = {
    "schatten": "Schatten", "s": "Schatten", "p": "Schatten",
    "weak": "WeakLp", "weaklp": "WeakLp", "weak-lp": "WeakLp",
    "kyfan": "KyFan", "ky-fan": "KyFan",
    "op": "OperatorNorm", "operator": "OperatorNorm", "opnorm": "OperatorNorm",
}


@dataclass(frozen=True)
class NormSpec:
    """Which symmetric (quasi-)norm is meant.

    ``Schatten`` takes ``p`` in [1, inf], ``WeakLp`` takes ``p`` in [1, inf),
    ``KyFan`` takes an integer ``k >= 1`` and ``OperatorNorm`` takes nothing.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        k, p = self.kind, self.param
        if k == "Schatten":
            ok = p is not None and p >= 1
        elif k == "WeakLp":
            ok = p is not None and 1 <= p < math.inf
        elif k == "KyFan":
            ok = p is not None and p >= 1 and float(p).is_integer()
        elif k == "OperatorNorm":
            ok = p is None
        else:
            ok = False
        if not ok:
            raise InvalidSpec(f"invalid norm spec {k}({p})")

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        """Parse ``schatten:2``, ``schatten:inf``, ``weak:1``, ``kyfan:3`` or ``op``."""
        head, _, tail = text.strip().partition(":")
        kind = _KIND_ALIASES.get(head.strip().lower())
        if kind is None:
            raise InvalidSpec(f"unknown norm {text!r}")
        if kind == "OperatorNorm":
            if tail:
                raise InvalidSpec(f"operator norm takes no parameter: {text!r}")
            return cls(kind)
        try:
            value = float(tail)
        except ValueError:
            raise InvalidSpec(f"bad norm parameter in {text!r}") from None
        return cls(kind, value)

    @property
    def label(self) -> str:
        if self.kind == "OperatorNorm":
            return "op"
        p = self.param
        tag = {"Schatten": "schatten", "WeakLp": "weak", "KyFan": "kyfan"}[self.kind]
        return f"{tag}:{'inf' if p == math.inf else f'{p:g}'}"

    @property
    def is_quasi(self) -> bool:
        return self.kind == "WeakLp"

    @property
    def auxiliary(self) -> bool:
        return self.kind == "KyFan"

    def sum_factor(self, m: int) -> float:
        """Constant K_m with ``||x_1 + ... + x_m|| <= K_m * sum ||x_i||``.

        1 for genuine norms. For the weak quasi-norm ``s_{m(k-1)+1}(sum x_i)
        <= sum s_k(x_i)`` gives ``K_m = m^(1/p)``.
        """
        return float(m) ** (1.0 / self.param) if self.is_quasi else 1.0

    def interpolation_factor(self) -> float:
        """Constant in ``||B0^(1-t) A B1^t|| <= c ||B0||^(1-t) ||A|| ||B1||^t``.

        1 for norms monotone under submajorization; ``2^(1/p)`` for the weak
        quasi-norm via ``s_{2k-1}(XAY) <= s_k(X) ||A|| s_k(Y)``.
        """
        return 2.0 ** (1.0 / self.param) if self.is_quasi else 1.0


OPERATOR_NORM = NormSpec("OperatorNorm")


def schatten(p: float) -> NormSpec:
    return NormSpec("Schatten", float(p))


def weak_lp(p: float) -> NormSpec:
    return NormSpec("WeakLp", float(p))


def ky_fan(k: int) -> NormSpec:
    return NormSpec("KyFan", float(k))


def singular_values(T) -> np.ndarray:
    """Singular values in non-increasing order.

    Hermitian input uses ``|eigenvalues|``; general input diagonalizes the
    Hermitian dilation ``[[0, T], [T*, 0]]`` whose spectrum is ``+-s_k``.
    """
    if isinstance(T, HermitianOperator):
        return np.sort(np.abs(T.spectrum))[::-1].copy()
    a = np.asarray(T, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    if np.allclose(a, a.conj().T, rtol=0.0, atol=1e-14 * (1.0 + np.abs(a).max())):
        w, _ = _eigh(0.5 * (a + a.conj().T))
        return np.sort(np.abs(w))[::-1].copy()
    dil = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    dil[:n, n:] = a
    dil[n:, :n] = a.conj().T
    w, _ = _eigh(dil)
    return np.clip(w[::-1][:n], 0.0, None).copy()


def _norm_of_values(s: np.ndarray, spec: NormSpec) -> float:
    if s.size == 0:
        return 0.0
    top = float(s[0])
    if spec.kind == "OperatorNorm" or (spec.kind == "Schatten" and spec.param == math.inf):
        return top
    if top == 0.0:
        return 0.0
    if spec.kind == "Schatten":
        p = spec.param
        return top * float(np.sum((s / top) ** p)) ** (1.0 / p)
    if spec.kind == "WeakLp":
        k = np.arange(1, s.size + 1, dtype=float)
        return float(np.max(k ** (1.0 / spec.param) * s))
    k = int(spec.param)
    if k > s.size:
        raise InvalidSpec(f"Ky Fan index {k} exceeds dimension {s.size}")
    return float(np.sum(s[:k]))


def norm_from_singular_values(s, spec: NormSpec) -> float:
    s = np.sort(np.abs(np.asarray(s, dtype=float)))[::-1]
    return _norm_of_values(s, spec)


def norm_eval(T, spec: NormSpec) -> float:
    """``||T||_E`` for the symmetric norm described by ``spec``."""
    return _norm_of_values(singular_values(T), spec)


def two_convex_norm(T, spec: NormSpec) -> float:
    """Norm of the 2-convexification: ``|| |T|^2 ||_E^(1/2)``."""
    s = singular_values(T)
    return math.sqrt(_norm_of_values(s * s, spec))


@dataclass(frozen=True)
class Majorization:
    holds: bool
    margins: np.ndarray  # partial-sum(F) - partial-sum(G), one per k


def submajorization_check(F, G, tol: float = 1e-10) -> Majorization:
    """Whether ``G`` is submajorized by ``F`` (all Ky Fan partial sums)."""
    F = np.asarray(F)
    G = np.asarray(G)
    if F.shape != G.shape:
        raise DimensionMismatch(f"shapes {F.shape} and {G.shape} differ")
    margins = np.cumsum(singular_values(F)) - np.cumsum(singular_values(G))
    return Majorization(bool(np.all(margins >= -tol)), margins)


def interpolation_bound_check(B0, A, B1, theta: float, spec: NormSpec) -> EstimateReport:
    """Check ``||B0^(1-theta) A B1^theta||_E <= ||B0||_E^(1-theta) ||A|| ||B1||_E^theta``."""
    if not 0.0 <= theta <= 1.0:
        raise NonPositiveFactor(f"theta must lie in [0, 1], got {theta}")
    B0 = HermitianOperator(B0) if not isinstance(B0, HermitianOperator) else B0
    B1 = HermitianOperator(B1) if not isinstance(B1, HermitianOperator) else B1
    for name, B in (("B0", B0), ("B1", B1)):
        floor = -1e-12 * max(1.0, B.norm)
        if B.spectrum.size and B.spectrum[0] < floor:
            raise NonPositiveFactor(f"{name} is not positive semidefinite "
                                    f"(min eigenvalue {B.spectrum[0]:.3e})")

    def frac_power(B, e):
        w = np.clip(B.spectrum, 0.0, None)
        vals = np.where(w > 0, w, 0.0) ** e if e > 0 else np.ones_like(w)
        return HermitianOperator.from_eig(vals, B.eigenvectors).entries

    Z = frac_power(B0, 1.0 - theta) @ np.asarray(A, dtype=np.complex128) @ frac_power(B1, theta)
    lhs = norm_eval(Z, spec)
    rhs = (norm_eval(B0, spec) ** (1.0 - theta) * norm_eval(A, OPERATOR_NORM)
           * norm_eval(B1, spec) ** theta)
    return EstimateReport.build(
        "interpolation", lhs, rhs, spec.interpolation_factor(),
        params={"theta": theta, "norm": spec.label},
        notes="interpolation bound" + (" (quasi-norm factor 2^(1/p))" if spec.is_quasi else ""),
    )
