"""Scalar functions on the real line used by the spectral calculus.

Each :class:`ScalarFunction` carries a family tag and parameters so reports can
say exactly which function was applied, and it knows its own derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidParameter

FAMILIES = (
    "MainF", "FAlpha", "HAlpha", "PowerOneMinusR", "ImagPower",
    "QuarterPower", "Sign", "Polynomial", "Custom", "Tabulated",
)


@dataclass(frozen=True)
class ScalarFunction:
    family: str
    params: tuple = ()
    name: str = ""
    _fn: Callable | None = field(default=None, repr=False, compare=False)
    _dfn: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown function family {self.family!r}")
        if self.family in ("FAlpha", "HAlpha") and not self.params[0] > 0:
            raise InvalidParameter(f"{self.family} requires alpha > 0, got {self.params[0]}")
        if self.family == "PowerOneMinusR" and not np.isfinite(self.params[0]):
            raise InvalidParameter("r must be finite")

    @property
    def is_real(self) -> bool:
        return self.family != "ImagPower"

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if not self.params or self.family in ("Custom", "Tabulated"):
            return self.family
        return f"{self.family}({', '.join(f'{p:g}' for p in self.params)})"

    def check_domain(self, t) -> None:
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError(f"{self.label}: non-finite argument")
        if self.family == "Sign" and np.any(t == 0.0):
            raise DomainError("Sign is undefined at 0")
        if self.family == "PowerOneMinusR" and np.any(t <= 0.0):
            raise DomainError(f"{self.label} needs strictly positive arguments")

    def __call__(self, t):
        self.check_domain(t)
        t = np.asarray(t, dtype=float)
        fam, p = self.family, self.params
        if fam == "MainF":
            return t / np.sqrt(1.0 + t * t)
        if fam == "FAlpha":
            return t / np.hypot(p[0], t)
        if fam == "HAlpha":
            return 1.0 / np.hypot(p[0], t)
        if fam == "PowerOneMinusR":
            return t ** (1.0 - p[0])
        if fam == "ImagPower":
            return np.exp(0.5j * p[0] * np.log1p(t * t))
        if fam == "QuarterPower":
            return (1.0 + t * t) ** 0.25
        if fam == "Sign":
            return np.sign(t)
        if fam == "Polynomial":
            return np.polynomial.polynomial.polyval(t, p)
        if fam == "Tabulated":
            x, y = np.asarray(p[0]), np.asarray(p[1])
            return np.interp(t, x, y)
        return np.asarray(self._fn(t))

    def derivative(self, t):
        self.check_domain(t)
        t = np.asarray(t, dtype=float)
        fam, p = self.family, self.params
        if fam == "MainF":
            return (1.0 + t * t) ** -1.5
        if fam == "FAlpha":
            a2 = p[0] ** 2
            return a2 / (a2 + t * t) ** 1.5
        if fam == "HAlpha":
            return -t / (p[0] ** 2 + t * t) ** 1.5
        if fam == "PowerOneMinusR":
            return (1.0 - p[0]) * t ** (-p[0])
        if fam == "ImagPower":
            return 1j * p[0] * t / (1.0 + t * t) * self(t)
        if fam == "QuarterPower":
            return 0.5 * t * (1.0 + t * t) ** -0.75
        if fam == "Sign":
            return np.zeros_like(t)
        if fam == "Polynomial":
            return np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(p))
        if fam == "Tabulated":
            x, y = np.asarray(p[0]), np.asarray(p[1])
            return np.interp(t, x, np.gradient(y, x))
        if self._dfn is None:
            raise DomainError(f"{self.label} has no derivative")
        return np.asarray(self._dfn(t))


def main_f() -> ScalarFunction:
    """t -> t (1 + t^2)^(-1/2), the bounded transform."""
    return ScalarFunction("MainF")


def f_alpha(alpha: float) -> ScalarFunction:
    return ScalarFunction("FAlpha", (float(alpha),))


def h_alpha(alpha: float) -> ScalarFunction:
    return ScalarFunction("HAlpha", (float(alpha),))


def power_one_minus_r(r: float) -> ScalarFunction:
    return ScalarFunction("PowerOneMinusR", (float(r),))


def imag_power(s: float) -> ScalarFunction:
    """t -> (1 + t^2)^(i s / 2); unitary-valued under the spectral calculus."""
    return ScalarFunction("ImagPower", (float(s),))


def quarter_power() -> ScalarFunction:
    return ScalarFunction("QuarterPower")


def sign() -> ScalarFunction:
    return ScalarFunction("Sign")


def polynomial(coeffs) -> ScalarFunction:
    """Polynomial with coefficients in increasing degree."""
    return ScalarFunction("Polynomial", tuple(float(c) for c in coeffs))


def tabulated(x, y) -> ScalarFunction:
    x = tuple(float(v) for v in x)
    y = tuple(float(v) for v in y)
    if len(x) != len(y) or len(x) < 2 or np.any(np.diff(x) <= 0):
        raise InvalidParameter("tabulated function needs increasing x of matching length")
    return ScalarFunction("Tabulated", (x, y))


def custom(name: str, fn: Callable, dfn: Callable | None = None) -> ScalarFunction:
    return ScalarFunction("Custom", (), name, fn, dfn)
