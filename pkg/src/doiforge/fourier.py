"""Sampled Fourier pairs (g, ghat) and the norms that bound Schur multipliers.

Convention: ``ghat(s) = (2 pi)^(-1/2) * integral g(t) exp(-i s t) dt`` and
``g(t) = (2 pi)^(-1/2) * integral ghat(s) exp(i s t) ds``. With this
normalization a kernel ``phi(lam, mu) = g(log(lam/mu))`` satisfies
``||T_phi|| <= (2 pi)^(-1/2) ||ghat||_1``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidParameter, TailMassTooLarge
from .kernels import chi0, chi1

SQRT_2PI = math.sqrt(2.0 * math.pi)
TAIL_RTOL = 1e-6
PROFILE_FAMILIES = ("SechHalf", "ThetaExp", "WeakLpChi0", "WeakLpChi1")


def _g_theta(t, theta):
    # 1/(e^{theta t} + e^{(theta-1) t}) without overflow
    return np.exp(-theta * t - np.logaddexp(0.0, -t))


def _g_chi0(t, r):
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    q = np.where(small, 1.0 - r, np.expm1((1.0 - r) * safe) / np.expm1(safe))
    return chi0(t) * q


def _g_chi1(t):
    c = chi1(t)
    den = np.where(c > 0, 2.0 * np.sinh(0.5 * t), 1.0)
    return c / den


def _family(family, params):
    """(g, decay rate of |g| as |t| -> inf, support half-width or None)."""
    if family == "SechHalf":
        return (lambda t: _g_theta(t, 0.5)), 0.5, None
    if family == "ThetaExp":
        (theta,) = params
        if not 0.0 < theta < 1.0:
            raise InvalidParameter(f"theta must lie in (0, 1), got {theta}")
        return (lambda t: _g_theta(t, theta)), min(theta, 1.0 - theta), None
    if family == "WeakLpChi0":
        (r,) = params
        if not r > 1.0:
            raise InvalidParameter(f"r must exceed 1, got {r}")
        return (lambda t: _g_chi0(t, r)), math.inf, 2.0
    if family == "WeakLpChi1":
        return _g_chi1, 0.5, None
    raise InvalidParameter(f"unknown profile family {family!r}; expected one of {PROFILE_FAMILIES}")


@dataclass(frozen=True)
class FourierProfile:
    family: str
    params: tuple
    t: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    ghat: np.ndarray = field(repr=False)
    s_weights: np.ndarray = field(repr=False)
    l2_g: float
    l2_gprime: float
    l1_ghat: float
    tail_t: float
    tail_s: float
    L: float
    h: float
    S: float
    ds: float
    method: str = "trapezoid"

    @property
    def sobolev_bound(self) -> float:
        """``sqrt(2) (||g||_2 + ||g'||_2)``, an upper bound for ``||ghat||_1``."""
        return math.sqrt(2.0) * (self.l2_g + self.l2_gprime)

    @property
    def multiplier_bound(self) -> float:
        """``(2 pi)^(-1/2) ||ghat||_1``."""
        return self.l1_ghat / SQRT_2PI

    def g_at(self, t):
        return _family(self.family, self.params)[0](np.asarray(t, dtype=float))

    def metadata(self) -> dict:
        return {"family": self.family, "params": list(self.params), "L": self.L, "h": self.h,
                "S": self.S, "ds": self.ds, "method": self.method,
                "tail_t": self.tail_t, "tail_s": self.tail_s}


def _trap(y, h):
    return h * (np.sum(y) - 0.5 * (y[0] + y[-1]))


def _stencil_derivative(f, t, h):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12.0 * h)


def default_grid(family: str, params=()) -> tuple[float, float]:
    """``(L, h)`` wide enough that the t-tail is below round-off for the family."""
    _, rate, support = _family(family, tuple(params))
    if support is not None:
        return 60.0, 0.01
    L = max(60.0, 30.0 / rate)
    return L, max(0.01, 2.0 * L / 12000.0)


def _s_grid(family, params, S, ds, mapped):
    if not mapped:
        ns = int(round(2 * S / ds))
        s = np.linspace(-S, S, ns + 1)
        return s, _trap_weights(s), "uniform"
    # sinh map: spacing ~ m/20 near 0 where ghat has width ~ m, growing outward
    m = min(params[0], 1.0 - params[0])
    U = math.asinh(S / m)
    u = np.linspace(-U, U, 2 * int(math.ceil(U / 0.02)) + 1)
    w = _trap_weights(u) * m * np.cosh(u)
    return m * np.sinh(u), w, "sinh-mapped"


def fourier_profile(family: str, params=(), *, L: float | None = None, h: float | None = None,
                    S: float | None = None, ds: float | None = None, mapped: bool | None = None,
                    check_tail: bool = True) -> FourierProfile:
    """Sample g on ``[-L, L]`` and ghat on ``[-S, S]`` by trapezoid quadrature.

    The compactly supported cutoff families have transforms that decay only
    like ``exp(-c sqrt|s|)``, so their default frequency window is wider.
    ThetaExp with ``min(theta, 1-theta) < 0.1`` has a spike of width ~theta
    at ``s = 0``; by default it gets a sinh-mapped frequency grid instead of
    a uniform one (``mapped`` forces either choice).

    Raises TailMassTooLarge when the estimated mass outside either grid
    exceeds ``1e-6`` of the total.
    """
    params = tuple(float(p) for p in params)
    g_fn, rate, support = _family(family, params)
    wide = family in ("WeakLpChi0", "WeakLpChi1")
    S = (200.0 if wide else 40.0) if S is None else float(S)
    ds = (0.02 if wide else 0.01) if ds is None else float(ds)
    if mapped is None:
        mapped = family == "ThetaExp" and min(params[0], 1.0 - params[0]) < 0.1
    if mapped and family != "ThetaExp":
        raise InvalidParameter("the mapped frequency grid is only set up for ThetaExp")
    dL, dh = default_grid(family, params)
    L = dL if L is None else float(L)
    # keep the periodic images of ghat (period 2 pi / h) away from [-S, S]
    h = min(dh, 2.0 * math.pi / (S + 12.0)) if h is None else float(h)
    if not (L > 0 and h > 0 and S > 0 and ds > 0):
        raise InvalidParameter("grid sizes must be positive")
    nt = int(round(2 * L / h))
    t = np.linspace(-L, L, nt + 1)
    h = t[1] - t[0]
    g = g_fn(t)
    gp = _stencil_derivative(g_fn, t, h * 0.5)

    s, sw, kind = _s_grid(family, params, S, ds, mapped)
    w = g.copy()
    w[0] *= 0.5
    w[-1] *= 0.5
    ghat = _backend.fourier_trapezoid(-L, h, w, s) * (h / SQRT_2PI)

    l1_g = _trap(np.abs(g), h)
    l2_g = math.sqrt(_trap(g * g, h))
    l2_gp = math.sqrt(_trap(gp * gp, h))
    absg = np.abs(ghat)
    l1_ghat = float(np.dot(absg, sw))

    if support is not None and support < L:
        tail_t = 0.0
    else:
        tail_t = (abs(g[0]) + abs(g[-1])) / rate
    tail_s = _spectral_tail(s, absg)
    if check_tail:
        if tail_t > TAIL_RTOL * l1_g:
            raise TailMassTooLarge(f"{family}{params}: t-tail {tail_t:.2e} exceeds "
                                   f"{TAIL_RTOL:g} of {l1_g:.3e}; widen L")
        if tail_s > TAIL_RTOL * l1_ghat:
            raise TailMassTooLarge(f"{family}{params}: s-tail {tail_s:.2e} exceeds "
                                   f"{TAIL_RTOL:g} of {l1_ghat:.3e}; widen S")
    ds_out = float(s[1] - s[0]) if kind == "uniform" else float(np.min(np.diff(s)))
    return FourierProfile(family, params, t, g, s, ghat, sw, l2_g, l2_gp, l1_ghat,
                          float(tail_t), float(tail_s), float(L), float(h), float(S), ds_out,
                          f"trapezoid/{kind}")


def _spectral_tail(s, absg):
    """Mass of |ghat| beyond the grid, extrapolating the decay seen on the last unit."""
    tail = 0.0
    for sign in (1.0, -1.0):
        x = sign * s
        order = np.argsort(x)
        x, y = x[order], absg[order]
        end = y[-1]
        if end <= 0.0:
            continue
        inner = float(np.interp(x[-1] - 1.0, x, y))
        rate = math.log(inner / end) if inner > end else 0.0
        tail += end / rate if rate > 1e-3 else end * 1e3
    return tail


def _trap_weights(s):
    w = np.zeros_like(s)
    d = np.diff(s)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def synthesize_from_profile(profile: FourierProfile, lam, mu):
    """``(2 pi)^(-1/2) * integral ghat(s) (lam/mu)^(i s) ds`` by trapezoid in s.

    Returns complex values; for real even ``g`` the imaginary part is round-off.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(lam <= 0) or np.any(mu <= 0):
        raise InvalidParameter("synthesis needs positive arguments")
    if profile.tail_s > TAIL_RTOL * profile.l1_ghat:
        raise TailMassTooLarge("profile s-tail too heavy for synthesis")
    u = np.log(lam) - np.log(mu)
    w = profile.ghat * profile.s_weights
    phase = np.exp(1j * np.multiply.outer(u, profile.s))
    out = phase @ w / SQRT_2PI
    return out if out.ndim else complex(out)


def write_profile_csv(profile: FourierProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["s", "ghat_re", "ghat_im"])
        for s, z in zip(profile.s, profile.ghat):
            wr.writerow([f"{s:.6f}", f"{z.real:.12e}", f"{z.imag:.12e}"])


def sobolev_sum(theta: float) -> float:
    """``||g||_2 + ||g'||_2`` for the ThetaExp family, computed on the t-grid alone."""
    g_fn, _, _ = _family("ThetaExp", (float(theta),))
    L, h = default_grid("ThetaExp", (theta,))
    t = np.linspace(-L, L, int(round(2 * L / h)) + 1)
    h = t[1] - t[0]
    g = g_fn(t)
    gp = _stencil_derivative(g_fn, t, 0.5 * h)
    return math.sqrt(_trap(g * g, h)) + math.sqrt(_trap(gp * gp, h))


@dataclass(frozen=True)
class ThetaScaling:
    thetas: np.ndarray
    sobolev: np.ndarray
    exponent: float
    intercept: float


def theta_scaling_fit(thetas=None) -> ThetaScaling:
    """Least-squares slope of ``log(||g||_2 + ||g'||_2)`` against ``log theta``."""
    if thetas is None:
        thetas = np.geomspace(0.05, 0.5, 12)
    thetas = np.asarray(thetas, dtype=float)
    vals = np.array([sobolev_sum(th) for th in thetas])
    slope, icpt = np.polyfit(np.log(thetas), np.log(vals), 1)
    return ThetaScaling(thetas, vals, float(slope), float(icpt))
