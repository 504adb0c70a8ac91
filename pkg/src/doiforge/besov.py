"""Poisson smoothing on a sampled line and the Besov-type inequality chain.

A :class:`SampledFunction` lives on a uniform symmetric grid.  Outside the
grid it is continued by its end values plus an optional algebraic tail model
``c + d |t|^-k`` (the ``decay`` tag), and the Poisson integral of that
continuation is computed exactly for the piecewise-linear interpolant: if
``K_s`` is the second antiderivative of ``P_s`` in ``t``, then

    (f * P_s)(t) = (f(-L) + f(L)) / 2 + sum_m dc_m K_s(t - t_m)

where ``dc_m`` is the slope jump at knot ``t_m``.  Since ``sum dc_m = 0`` the
logarithmic growth of ``K_s`` cancels, and the heavy Cauchy tails beyond the
grid are accounted for in closed form.  The ``s`` derivatives come from the
analytic ``s`` derivatives of the same kernel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import fft as sfft

from ._backend import holder_max
from .errors import InvalidParameter, TailMassTooLarge
from .report import EstimateReport

DECAY_ORDERS = {"constant": 0, "inverse": 1, "inverse-square": 2}
MASS_TOL = 1e-6
TAIL_TOL = 1e-6
# sup|dP_s/ds|_1 = 2 / (pi s), so the half-step bound has constant 4 / pi
HALF_STEP_CONSTANT = 4.0 / math.pi


@dataclass(frozen=True)
class SampledFunction:
    L: float
    h: float
    values: np.ndarray = field(repr=False)
    decay: str = "constant"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise InvalidParameter("values must be a 1-d array with at least 3 samples")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("sampled values must be finite")
        if self.decay not in DECAY_ORDERS:
            raise InvalidParameter(f"unknown decay tag {self.decay!r}")
        if not (self.L > 0 and self.h > 0):
            raise InvalidParameter("L and h must be positive")
        if abs((v.size - 1) * self.h - 2 * self.L) > 1e-9 * self.L:
            raise InvalidParameter("grid must cover [-L, L] with step h")
        object.__setattr__(self, "values", v)

    @property
    def t(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.values.size)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def interior(self, fraction: float = 0.5) -> np.ndarray:
        return np.abs(self.t) <= fraction * self.L + 0.5 * self.h

    def derivative(self) -> "SampledFunction":
        """Second-order finite-difference derivative on the same grid."""
        return SampledFunction(self.L, self.h, np.gradient(self.values, self.h, edge_order=2),
                               "inverse-square" if self.decay != "constant" else "constant")


def sample(f: Callable, L: float = 100.0, h: float = 1e-3, decay: str = "constant") -> SampledFunction:
    n = int(round(2 * L / h))
    if n < 2:
        raise InvalidParameter("grid needs at least 3 points")
    t = np.linspace(-L, L, n + 1)
    return SampledFunction(float(L), 2 * float(L) / n, np.asarray(f(t), dtype=float), decay)


def poisson_kernel(t, s):
    if np.any(np.asarray(s) <= 0):
        raise InvalidParameter("s must be positive")
    t = np.asarray(t, dtype=float)
    return s / (math.pi * (t * t + s * s))


def dpoisson_ds(t, s):
    t2 = np.asarray(t, dtype=float) ** 2
    return (t2 - s * s) / (math.pi * (t2 + s * s) ** 2)


def d2poisson_ds2(t, s):
    t2 = np.asarray(t, dtype=float) ** 2
    return 2 * s * (s * s - 3 * t2) / (math.pi * (t2 + s * s) ** 3)


# Kernels acting on the slope jumps.  _k0 is K_s(u) - |u|/2, which stays
# bounded by O(s log) instead of growing linearly; the |u|/2 part sums back
# to the interpolant itself.

def _k0(u, s):
    a = np.abs(u)
    return -(a / math.pi) * np.arctan2(s, a) - (s / (2 * math.pi)) * np.log(u * u + s * s)


def _k1(u, s):
    # d/ds K_s with the constant -1/pi dropped (it multiplies sum dc = 0)
    return -np.log(u * u + s * s) / (2 * math.pi)


def _k2(u, s):
    return -s / (math.pi * (u * u + s * s))


_KERNELS = (_k0, _k1, _k2)


def _slope_jumps(v: np.ndarray, h: float) -> np.ndarray:
    slopes = np.diff(v) / h
    dc = np.empty_like(v)
    dc[0] = slopes[0]
    dc[1:-1] = np.diff(slopes)
    dc[-1] = -slopes[-1]
    return dc


class _Convolver:
    """Linear convolution of fixed slope jumps with kernels sampled on grid offsets."""

    def __init__(self, f: SampledFunction):
        self.f = f
        self.n = f.size
        self.dc = _slope_jumps(f.values, f.h)
        self.offsets = f.h * np.arange(-(self.n - 1), self.n)
        # outputs n-1 .. 2n-2 of a circular convolution this long never wrap
        self.nfft = sfft.next_fast_len(2 * self.n - 1, real=True)
        self.dc_hat = sfft.rfft(self.dc, self.nfft)

    def apply(self, kernel, s):
        kv = kernel(self.offsets, s)
        full = sfft.irfft(sfft.rfft(kv, self.nfft) * self.dc_hat, self.nfft)
        return full[self.n - 1:2 * self.n - 1]

    def at(self, kernel, s, points):
        """Direct sums at arbitrary points (used off the grid)."""
        t = self.f.t
        return np.array([np.dot(self.dc, kernel(p - t, s)) for p in np.atleast_1d(points)])


def _tail_integral(k: int, t, s, L):
    """Closed-form integral of tau^-k P_s(t - tau) over tau > L, for k in {0, 1, 2}."""
    ang = np.arctan2(s, L - t)
    if k == 0:
        return ang / math.pi
    rho2 = t * t + s * s
    lg = np.log(((L - t) ** 2 + s * s) / (L * L))
    if k == 1:
        return (s * lg / (2 * rho2) + t * ang / rho2) / math.pi
    return (((t * t - s * s) * ang + s * t * lg) / rho2 ** 2 + s / (rho2 * L)) / math.pi


def _tail_model(f: SampledFunction, side: int):
    """Fit ``c + d tau^-k`` on one side; return (d, misfit)."""
    k = DECAY_ORDERS[f.decay]
    v = f.values if side > 0 else f.values[::-1]
    m = max(1, int(round(0.1 * f.L / f.h)))
    L = f.L
    x0, x1, x2 = L, L - m * f.h, L - 2 * m * f.h
    y0, y1, y2 = v[-1], v[-1 - m], v[-1 - 2 * m]
    if k == 0:
        return 0.0, max(abs(y1 - y0), abs(y2 - y0))
    d = (y0 - y1) / (x0 ** -k - x1 ** -k)
    c = y0 - d * x0 ** -k
    return d, abs(y2 - (c + d * x2 ** -k))


def _tail_correction(f: SampledFunction, s: float, t, tol: float | None):
    k = DECAY_ORDERS[f.decay]
    out = np.zeros_like(np.asarray(t, dtype=float))
    worst = 0.0
    for side in (1, -1):
        d, misfit = _tail_model(f, side)
        worst = max(worst, misfit * float(_tail_integral(0, 0.0, s, f.L)))
        if k:
            tt = side * np.asarray(t, dtype=float)
            out = out + d * (_tail_integral(k, tt, s, f.L) - f.L ** -k * _tail_integral(0, tt, s, f.L))
    if tol is not None and worst > tol:
        raise TailMassTooLarge(
            f"tail model misfit x outside mass = {worst:.3g} > {tol:g} at s={s:g}; widen the grid")
    return out, worst


def _kernel_mass(f: SampledFunction, s: float) -> float:
    """Mass of P_s seen from the grid centre: grid part plus the two arctan tails."""
    inside = 2 * math.atan2(f.L, s) / math.pi
    return inside + 2 * float(_tail_integral(0, 0.0, s, f.L))


def poisson_smooth(f: SampledFunction, s: float, *, tail_tol: float | None = TAIL_TOL) -> SampledFunction:
    """Poisson integral ``u(., s)`` on the same grid.

    Raises :class:`TailMassTooLarge` when the algebraic tail model fits the
    end samples so poorly that the mass of ``P_s`` beyond the grid makes the
    result uncertain above ``tail_tol``.
    """
    if not s > 0:
        raise InvalidParameter("s must be positive")
    mass = _kernel_mass(f, s)
    if abs(mass - 1.0) > MASS_TOL:
        raise TailMassTooLarge(f"kernel mass {mass!r} differs from 1")
    conv = _Convolver(f)
    v = f.values
    u = v + conv.apply(_k0, s)
    corr, _ = _tail_correction(f, s, f.t, tail_tol)
    return SampledFunction(f.L, f.h, u + corr, "inverse")


def poisson_derivatives(f: SampledFunction, s_values, *, probes: bool = True):
    """Sup norms of ``u'_s`` and ``u''_ss`` for each ``s``.

    The sup runs over the grid and, when ``probes`` is set, over a few points
    at distance of order ``s`` outside it, where the extrema sit once ``s``
    exceeds the grid half-width.
    """
    conv = _Convolver(f)
    s_values = np.asarray(s_values, dtype=float)
    d1 = np.empty(s_values.size)
    d2 = np.empty(s_values.size)
    for i, s in enumerate(s_values):
        a = np.max(np.abs(conv.apply(_k1, s)))
        b = np.max(np.abs(conv.apply(_k2, s)))
        if probes:
            far = s * np.array([0.5, 1 / math.sqrt(3), 1.0, 2.0])
            far = far[far > f.L]
            if far.size:
                pts = np.concatenate([far, -far])
                a = max(a, float(np.max(np.abs(conv.at(_k1, s, pts)))))
                b = max(b, float(np.max(np.abs(conv.at(_k2, s, pts)))))
        d1[i], d2[i] = a, b
    return d1, d2


@dataclass(frozen=True)
class HolderEstimate:
    """Grid maximum of the Hoelder quotient; never larger than the true seminorm."""

    value: float
    alpha: float
    pairs_stride: int
    band: int
    lower_bound: bool = True

    def __float__(self):
        return self.value


def holder_seminorm(f: SampledFunction, alpha: float, *, max_points: int = 2000,
                    band: int = 64) -> HolderEstimate:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameter("alpha must lie in [0, 1]")
    stride = max(1, -(-f.size // max_points))
    val = holder_max(f.t, f.values, alpha, stride, band)
    return HolderEstimate(float(val), float(alpha), stride, band)


def log_grid(per_decade: int = 200, decades=(-3, 3)) -> np.ndarray:
    lo, hi = decades
    return np.logspace(lo, hi, int(round((hi - lo) * per_decade)) + 1)


def _loglog_trapezoid(s, y):
    # integrand is close to a power law, so integrate in log s
    return float(np.trapezoid(y * s, np.log(s)))


@dataclass(frozen=True)
class BesovProfile:
    s: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    theta: float

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "du_sup", "d2u_sup", "scaled_du"])
            for s, a, b in zip(self.s, self.du, self.d2u):
                w.writerow([repr(float(s)), repr(float(a)), repr(float(b)),
                            repr(float(s ** (1 - self.theta) * a))])
        return path


def semigroup_residual(f: SampledFunction, s1: float, s2: float, fraction: float = 0.5) -> float:
    direct = poisson_smooth(f, s1 + s2)
    twice = poisson_smooth(poisson_smooth(f, s1), s2)
    mask = f.interior(fraction)
    return float(np.max(np.abs(direct.values[mask] - twice.values[mask])))


def besov_chain_check(f: SampledFunction, theta: float, eps: float, s_grid=None, *,
                      semigroup_pairs=((0.25, 0.25), (0.5, 1.0), (1.0, 2.0)),
                      semigroup_tol: float = 1e-6, half_step_every: int = 10,
                      tol: float = 1e-9) -> tuple[EstimateReport, BesovProfile]:
    """Run the two-piece bound on the Besov integral of ``f``.

    Returns the report and the ``(s, |u'_s|, |u''_ss|)`` profile.  The
    constants for the two power bounds are fitted on the grid; the half-step
    bound ``|u''_ss| <= (4/pi) |u'_{s/2}| / s`` is checked with its exact
    constant on every ``half_step_every``-th grid point.
    """
    if not 0.0 <= theta < 1.0:
        raise InvalidParameter("theta must lie in [0, 1)")
    if not 0.0 < eps <= 1.0:
        raise InvalidParameter("eps must lie in (0, 1]")
    s = log_grid() if s_grid is None else np.sort(np.asarray(s_grid, dtype=float))
    if s.size < 2 or s[0] <= 0:
        raise InvalidParameter("s grid needs at least two positive points")

    du, d2u = poisson_derivatives(f, s)
    f_hold = holder_seminorm(f, theta).value
    fp_hold = holder_seminorm(f.derivative(), eps).value

    c_theta = float(np.max(s ** (1 - theta) * du)) / f_hold if f_hold > 0 else 0.0
    c_eps = float(np.max(s ** (1 - eps) * d2u)) / fp_hold if fp_hold > 0 else 0.0

    small = s <= 1.0
    large = s >= 1.0
    i_small = _loglog_trapezoid(s[small], d2u[small]) if small.sum() > 1 else 0.0
    i_large = _loglog_trapezoid(s[large], d2u[large]) if large.sum() > 1 else 0.0
    # power-law tails beyond the grid, from the bounds s^(eps-1) and s^(theta-2)
    if s[0] < 1.0:
        i_small += d2u[0] * s[0] / eps
    if s[-1] > 1.0:
        i_large += d2u[-1] * s[-1] / (1 - theta)

    bound_small = c_eps * fp_hold / eps
    bound_large = HALF_STEP_CONSTANT * 2 ** (1 - theta) * c_theta * f_hold / (1 - theta)

    idx = np.arange(0, s.size, max(1, half_step_every))
    du_half, _ = poisson_derivatives(f, s[idx] / 2)
    half_lhs = d2u[idx]
    half_rhs = HALF_STEP_CONSTANT * du_half / s[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(half_rhs > 0, half_lhs / half_rhs, np.where(half_lhs > 0, np.inf, 0.0))
    half_ratio = float(np.max(q))

    sup_f = f.sup
    contraction = []
    semigroup = []
    for s1, s2 in semigroup_pairs:
        for sv in (s1, s2, s1 + s2):
            u = poisson_smooth(f, sv)
            contraction.append(u.sup / sup_f if sup_f > 0 else u.sup)
        semigroup.append(semigroup_residual(f, s1, s2))
    max_contraction = max(contraction) if contraction else 0.0
    max_semigroup = max(semigroup) if semigroup else 0.0

    finite = math.isfinite(i_small) and math.isfinite(i_large)
    ok = (finite and half_ratio <= 1 + 1e-6 and max_semigroup <= semigroup_tol
          and max_contraction <= 1 + 1e-6)
    lhs = i_small + i_large
    rhs = fp_hold / eps + f_hold / (1 - theta)
    constant = max(c_eps, HALF_STEP_CONSTANT * 2 ** (1 - theta) * c_theta)
    report = EstimateReport.build(
        "besov_chain", lhs, rhs, constant, tol=tol, passed=ok,
        params={"theta": theta, "eps": eps, "L": f.L, "h": f.h,
                "s_min": float(s[0]), "s_max": float(s[-1]), "s_points": int(s.size)},
        notes="integrals on a log grid with power-law tails; constants fitted on the grid",
        extras={"integral_small": i_small, "integral_large": i_large,
                "bound_small": bound_small, "bound_large": bound_large,
                "holder_f": f_hold, "holder_fprime": fp_hold,
                "holder_is_lower_bound": True,
                "c_theta_fit": c_theta, "c_eps_fit": c_eps,
                "scaled_du_max": float(np.max(s ** (1 - theta) * du)),
                "half_step_ratio": half_ratio,
                "semigroup_residual": max_semigroup,
                "contraction_ratio": max_contraction},
    )
    return report, BesovProfile(s, du, d2u, theta)
