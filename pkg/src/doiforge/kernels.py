"""Two-variable kernels phi(lam, mu) and the identities relating them.

A :class:`Kernel` is a tagged, vectorized function of two real arrays. The
tags carry enough information to rebuild the kernel, which the reports and
the Schur multiplier cache rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidParameter
from .functions import ScalarFunction, f_alpha, h_alpha, main_f, power_one_minus_r

DIAG_TOL = 1e-7

KERNEL_FAMILIES = (
    "DividedDifference", "PsiPrimeAlpha", "PsiZero", "PsiTheta", "PsiHAlphaFactor",
    "PhiPrime", "PhiDoublePrime", "WeakLpSplit", "Constant", "Left", "Right",
    "Product", "Sum", "Adjoint", "Custom",
)


def divided_difference(f: ScalarFunction, lam, mu, fprime: ScalarFunction | None = None):
    """``(f(lam) - f(mu)) / (lam - mu)``, or ``f'`` at the midpoint when the
    points are within ``DIAG_TOL * (1 + max(|lam|, |mu|))`` of each other.

    ``fprime`` overrides ``f.derivative`` when given. Broadcasts over arrays.
    """
    lam, mu = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(mu, dtype=float))
    gap = lam - mu
    close = np.abs(gap) <= DIAG_TOL * (1.0 + np.maximum(np.abs(lam), np.abs(mu)))
    out = np.empty(lam.shape, dtype=complex if not f.is_real else float)
    far = ~close
    if np.any(far):
        out[far] = (f(lam[far]) - f(mu[far])) / gap[far]
    if np.any(close):
        mid = 0.5 * (lam[close] + mu[close])
        out[close] = (fprime(mid) if fprime is not None else f.derivative(mid))
    return out if out.ndim else out[()]


def _sigma(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def chi0(t):
    """Smooth cutoff: 1 on [-1, 1], 0 outside [-2, 2], C-infinity in between."""
    a = np.abs(np.asarray(t, dtype=float))
    num = _sigma(2.0 - a)
    return num / (num + _sigma(a - 1.0))


def chi1(t):
    return 1.0 - chi0(t)


def _positive(name, *arrays):
    for a in arrays:
        if np.any(np.asarray(a) <= 0):
            raise DomainError(f"{name} is defined for positive arguments only")


def _sech_weights(s0: float):
    # composite Gauss-Legendre, panels of width <= 1/2; the weight is negligible past |s| = 40
    top = min(s0, 40.0)
    panels = max(1, int(math.ceil(2 * top / 0.5)))
    x, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(-top, top, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    # h(s) = ghat(s)/sqrt(2 pi) for g(t) = 1/(2 cosh(t/2))
    return s, ws * 0.5 / np.cosh(math.pi * s)


@dataclass(frozen=True)
class Kernel:
    family: str
    params: tuple = ()
    children: tuple = ()
    name: str = ""
    _fn: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise InvalidParameter(f"unknown kernel family {self.family!r}")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.family in ("Product", "Sum"):
            op = "*" if self.family == "Product" else "+"
            return "(" + op.join(c.label for c in self.children) + ")"
        if self.family == "Adjoint":
            return f"adj({self.children[0].label})"
        if self.family in ("DividedDifference", "Left", "Right"):
            return f"{self.family}[{self.params[0].label}]"
        if not self.params:
            return self.family
        return f"{self.family}({', '.join(f'{p:g}' if isinstance(p, float) else str(p) for p in self.params)})"

    @property
    def is_divided_difference(self) -> bool:
        return self.family == "DividedDifference"

    def __call__(self, lam, mu):
        return self.evaluate(lam, mu)

    def evaluate(self, lam, mu):
        lam = np.asarray(lam, dtype=float)
        mu = np.asarray(mu, dtype=float)
        fam, p = self.family, self.params
        if fam == "DividedDifference":
            return divided_difference(p[0], lam, mu, p[1] if len(p) > 1 else None)
        if fam == "PsiPrimeAlpha":
            return 1.0 / (np.hypot(p[0], lam) + np.hypot(p[0], mu))
        if fam == "PsiZero":
            _positive("PsiZero", lam, mu)
            return 1.0 / (lam + mu)
        if fam == "PsiTheta":
            _positive("PsiTheta", lam, mu)
            u = np.log(lam) - np.log(mu)
            th = p[0]
            # 1/(x^th + x^(th-1)) with x = e^u, written to avoid overflow
            return np.exp(-th * u - np.logaddexp(0.0, -u))
        if fam == "PsiHAlphaFactor":
            return (lam + mu) / (np.hypot(p[0], lam) * np.hypot(p[0], mu))
        if fam == "PhiPrime":
            a = np.sqrt(1.0 + lam * lam)
            b = np.sqrt(1.0 + mu * mu)
            return np.sqrt(a * b) / (a + b)
        if fam == "PhiDoublePrime":
            s, w = _sech_weights(p[0])
            u = 0.5 * (np.log1p(lam * lam) - np.log1p(mu * mu))
            return np.tensordot(np.cos(np.multiply.outer(u, s)), w, axes=1)
        if fam == "WeakLpSplit":
            return _weak_lp_split(lam, mu, p[0], p[1])
        if fam == "Constant":
            return np.full(np.broadcast(lam, mu).shape, p[0])
        if fam == "Left":
            return np.broadcast_to(p[0](lam), np.broadcast(lam, mu).shape)
        if fam == "Right":
            return np.broadcast_to(p[0](mu), np.broadcast(lam, mu).shape)
        if fam == "Product":
            out = self.children[0].evaluate(lam, mu)
            for c in self.children[1:]:
                out = out * c.evaluate(lam, mu)
            return out
        if fam == "Sum":
            out = self.children[0].evaluate(lam, mu)
            for c in self.children[1:]:
                out = out + c.evaluate(lam, mu)
            return out
        if fam == "Adjoint":
            return np.conj(self.children[0].evaluate(mu, lam))
        return np.asarray(self._fn(lam, mu))

    def matrix(self, left_values, right_values) -> np.ndarray:
        """``[phi(lam_i, mu_j)]`` over two spectra."""
        lam = np.asarray(left_values, dtype=float)[:, None]
        mu = np.asarray(right_values, dtype=float)[None, :]
        return np.asarray(self.evaluate(lam, mu))

    def __mul__(self, other: "Kernel") -> "Kernel":
        return Kernel("Product", children=(self, other))

    def __add__(self, other: "Kernel") -> "Kernel":
        return Kernel("Sum", children=(self, other))

    def adjoint(self) -> "Kernel":
        """``(lam, mu) -> conj(phi(mu, lam))``."""
        return Kernel("Adjoint", children=(self,))


def _weak_lp_split(lam, mu, r, part):
    _positive("WeakLpSplit", lam, mu)
    u = np.log(lam) - np.log(mu)
    x = np.exp(u)
    out = 0.0
    if part in ("chi0", "full"):
        c0 = chi0(u)
        small = np.abs(u) < 1e-8
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(small, 1.0 - r, -np.expm1((1.0 - r) * u) / np.where(small, 1.0, -np.expm1(u)))
        out = out + mu ** (-r) * c0 * q
    if part in ("chi1", "full"):
        c1 = chi1(u)
        den = np.where(c1 > 0, 2.0 * np.sinh(0.5 * u), 1.0)
        out = out + c1 * (lam ** (0.5 - r) * mu ** -0.5 - lam ** -0.5 * mu ** (0.5 - r)) / den
    return out


def psi_f(f: ScalarFunction, fprime: ScalarFunction | None = None) -> Kernel:
    """Divided difference kernel of ``f``."""
    return Kernel("DividedDifference", (f,) if fprime is None else (f, fprime))


def psi_prime_alpha(alpha: float) -> Kernel:
    if not alpha > 0:
        raise InvalidParameter(f"alpha must be positive, got {alpha}")
    return Kernel("PsiPrimeAlpha", (float(alpha),))


def psi_zero() -> Kernel:
    return Kernel("PsiZero")


def psi_theta(theta: float) -> Kernel:
    """``1/((lam/mu)^theta + (lam/mu)^(theta-1))`` for positive arguments."""
    if not 0.0 < theta < 1.0:
        raise InvalidParameter(f"theta must lie in (0, 1), got {theta}")
    return Kernel("PsiTheta", (float(theta),))


def psi_h_alpha_factor(alpha: float) -> Kernel:
    if not alpha > 0:
        raise InvalidParameter(f"alpha must be positive, got {alpha}")
    return Kernel("PsiHAlphaFactor", (float(alpha),))


def phi_prime() -> Kernel:
    """``(1+lam^2)^(1/4) (1+mu^2)^(1/4) / ((1+lam^2)^(1/2) + (1+mu^2)^(1/2))``."""
    return Kernel("PhiPrime")


def phi_double_prime(s0: float) -> Kernel:
    """Frequency-truncated ``phi_prime``: the synthesis integral over ``|s| <= s0``."""
    if not s0 > 0:
        raise InvalidParameter(f"s0 must be positive, got {s0}")
    return Kernel("PhiDoublePrime", (float(s0),))


def weak_lp_split(r: float, part: str = "full") -> Kernel:
    """Cutoff representation of the divided difference of ``t^(1-r)``.

    ``part`` selects the ``chi0`` piece, the ``chi1`` piece or their sum.
    """
    if not r > 1:
        raise InvalidParameter(f"r must exceed 1, got {r}")
    if part not in ("chi0", "chi1", "full"):
        raise InvalidParameter(f"unknown part {part!r}")
    return Kernel("WeakLpSplit", (float(r), part))


def constant(c) -> Kernel:
    return Kernel("Constant", (c,))


def left(f) -> Kernel:
    """``(lam, mu) -> f(lam)``."""
    return Kernel("Left", (f,))


def right(f) -> Kernel:
    """``(lam, mu) -> f(mu)``."""
    return Kernel("Right", (f,))


def custom(name: str, fn: Callable) -> Kernel:
    return Kernel("Custom", (), (), name, fn)


# --- factorization identities ------------------------------------------------

FACTORIZATIONS = (
    "falpha_resolution",      # psi_{f_alpha} = psi'_alpha (1 + (alpha^2 - lam mu)/(a b))
    "psi_zero_split",         # psi_0 * sqrt(lam mu) = psi_{1/2}
    "psi_theta_split",        # psi_0 = lam^(theta-1) mu^(-theta) psi_theta
    "halpha_resolution",      # psi_{h_alpha} = -(lam+mu)/(a b) psi'_alpha
    "power_split",            # psi_{t^(1-r)} = chi0/chi1 representation
    "phi_prime_substitution", # phi'(lam, mu) = psi_{1/2}((1+lam^2)^(1/2), (1+mu^2)^(1/2))
)


def default_grid(kind: str, n: int = 200):
    if kind in ("falpha_resolution", "halpha_resolution", "phi_prime_substitution"):
        x = np.linspace(-5.0, 5.0, n)
        return x, x
    if kind in ("psi_zero_split", "psi_theta_split"):
        x = np.linspace(10.0 / n, 10.0, n)
        return x, x
    if kind == "power_split":
        x = np.exp(np.linspace(-3.0, 3.0, n))
        return x, x
    raise InvalidParameter(f"unknown factorization {kind!r}")


def factorization_sides(kind: str, param=None, grid=None):
    """Both sides of a named kernel identity on ``grid = (lam_values, mu_values)``."""
    if kind not in FACTORIZATIONS:
        raise InvalidParameter(f"unknown factorization {kind!r}; expected one of {FACTORIZATIONS}")
    lam, mu = grid if grid is not None else default_grid(kind)
    L = np.asarray(lam, dtype=float)[:, None]
    M = np.asarray(mu, dtype=float)[None, :]
    if kind == "falpha_resolution":
        alpha = 1.0 if param is None else float(param)
        if not alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {alpha}")
        a, b = np.hypot(alpha, L), np.hypot(alpha, M)
        lhs = psi_f(f_alpha(alpha)).evaluate(L, M)
        rhs = psi_prime_alpha(alpha).evaluate(L, M) * (1.0 + (alpha ** 2 - L * M) / (a * b))
    elif kind == "psi_zero_split":
        lhs = psi_zero().evaluate(L, M) * np.sqrt(L * M)
        rhs = psi_theta(0.5).evaluate(L, M)
    elif kind == "psi_theta_split":
        theta = 0.5 if param is None else float(param)
        lhs = psi_zero().evaluate(L, M)
        rhs = L ** (theta - 1.0) * M ** (-theta) * psi_theta(theta).evaluate(L, M)
    elif kind == "halpha_resolution":
        alpha = 1.0 if param is None else float(param)
        lhs = psi_f(h_alpha(alpha)).evaluate(L, M)
        rhs = -psi_h_alpha_factor(alpha).evaluate(L, M) * psi_prime_alpha(alpha).evaluate(L, M)
    elif kind == "power_split":
        r = 2.0 if param is None else float(param)
        lhs = psi_f(power_one_minus_r(r)).evaluate(L, M)
        rhs = weak_lp_split(r).evaluate(L, M)
    else:
        lhs = phi_prime().evaluate(L, M)
        rhs = psi_theta(0.5).evaluate(np.sqrt(1.0 + L * L), np.sqrt(1.0 + M * M))
    return np.asarray(lhs), np.asarray(rhs)


def factorization_residual(kind: str, param=None, grid=None) -> float:
    """Max pointwise ``|lhs - rhs|`` of a named identity."""
    lhs, rhs = factorization_sides(kind, param, grid)
    return float(np.max(np.abs(lhs - rhs)))


def mainf_kernel() -> Kernel:
    return psi_f(main_f())
