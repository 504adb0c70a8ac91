"""Seeded random ensembles of Hermitian matrices and perturbations.

Every trial draws from ``numpy.random.Philox`` keyed by
``SeedSequence([seed, crc32(theorem_id), trial])``, so a trial can be
regenerated from ``(theorem_id, seed, trial)`` alone and trials can run in
any order.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .spectral import HermitianOperator

ZERO_GAP = 1e-6


def trial_rng(seed: int, theorem_id: str, trial: int) -> np.random.Generator:
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(theorem_id.encode()), int(trial)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def complex_gaussian(rng, n, m=None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def haar_unitary(rng, n) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def gaussian_hermitian(rng, n, scale: float = 1.0) -> HermitianOperator:
    """GUE-type sample; the spectrum has width of order ``scale`` for every ``n``."""
    x = complex_gaussian(rng, n)
    return HermitianOperator(scale * (x + x.conj().T) / (2.0 * np.sqrt(n)) * np.sqrt(2.0))


def prescribed_spectrum(rng, values) -> HermitianOperator:
    values = np.asarray(values, dtype=float)
    return HermitianOperator.from_eig(values, haar_unitary(rng, values.size))


def clustered_spectrum(rng, n, gap: float, spread: float = 3.0, floor: float = 0.0) -> HermitianOperator:
    """Eigenvalues in pairs ``(c, c + gap)``, centers spread over ``[-spread, spread]``.

    With ``floor > 0`` every eigenvalue has ``|lambda| >= floor``.
    """
    if gap <= 0:
        raise InvalidParameter("gap must be positive")
    centers = rng.uniform(floor, spread, size=(n + 1) // 2) * rng.choice([-1.0, 1.0], size=(n + 1) // 2)
    centers = np.where(centers >= 0, centers, centers - gap)
    vals = np.concatenate([centers, centers + gap])[:n]
    return prescribed_spectrum(rng, vals)


def periodic_derivative_model(N: int) -> HermitianOperator:
    """``diag(-N, ..., N)``: the derivative on the circle truncated to 2N+1 Fourier modes."""
    return HermitianOperator.diag(np.arange(-N, N + 1, dtype=float))


def away_from_zero(D: HermitianOperator, gap: float = ZERO_GAP) -> HermitianOperator:
    """Push eigenvalues with ``|lambda| < gap`` out to ``+-gap``."""
    w = D.spectrum
    if w.size == 0 or np.min(np.abs(w)) >= gap:
        return D
    w = np.where(np.abs(w) < gap, np.where(w < 0, -gap, gap), w)
    return HermitianOperator.from_eig(w, D.eigenvectors)


def hermitian_with_norm(rng, n, norm: float) -> HermitianOperator:
    """Random Hermitian matrix rescaled to operator norm ``norm``."""
    x = complex_gaussian(rng, n)
    h = HermitianOperator(0.5 * (x + x.conj().T))
    if h.norm == 0.0:
        return h
    return HermitianOperator.from_eig(h.spectrum * (norm / h.norm), h.eigenvectors)


def rank_one(rng, n, weight: float) -> HermitianOperator:
    v = complex_gaussian(rng, n, 1)[:, 0]
    v /= np.linalg.norm(v)
    return HermitianOperator(weight * np.outer(v, v.conj()))


def bounded_potential(rng, N: int, modes: int = 4, norm: float = 1.0) -> HermitianOperator:
    """Multiplication by a real trigonometric polynomial in the Fourier basis.

    ``v(x) = sum_{|k| <= modes} c_k e^{ikx}`` with ``c_{-k} = conj(c_k)``; the
    matrix ``V[m, n] = c_{m-n}`` on modes ``-N..N`` is rescaled to norm ``norm``.
    """
    c = complex_gaussian(rng, 1, modes + 1)[0] / (1.0 + np.arange(modes + 1)) ** 2
    c[0] = c[0].real
    size = 2 * N + 1
    V = np.zeros((size, size), dtype=complex)
    for k in range(-modes, modes + 1):
        ck = c[k] if k >= 0 else np.conj(c[-k])
        V += ck * np.eye(size, k=-k)
    h = HermitianOperator(V)
    return HermitianOperator.from_eig(h.spectrum * (norm / h.norm), h.eigenvectors)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for the base operator of a trial.

    ``kind`` is one of ``GaussianHermitian``, ``PrescribedSpectrum``,
    ``ClusteredSpectrum`` or ``PeriodicDerivativeModel``.
    """

    kind: str = "GaussianHermitian"
    n: int = 8
    scale: float = 1.0
    values: tuple = ()
    gap: float = 1e-3
    avoid_zero: bool = False

    def __post_init__(self):
        if self.kind not in ("GaussianHermitian", "PrescribedSpectrum", "ClusteredSpectrum",
                             "PeriodicDerivativeModel"):
            raise InvalidParameter(f"unknown ensemble kind {self.kind!r}")
        if self.kind != "PrescribedSpectrum" and self.n < 1:
            raise InvalidParameter("n must be positive")

    def generate(self, rng) -> HermitianOperator:
        if self.kind == "GaussianHermitian":
            D = gaussian_hermitian(rng, self.n, self.scale)
        elif self.kind == "PrescribedSpectrum":
            D = prescribed_spectrum(rng, self.values)
        elif self.kind == "ClusteredSpectrum":
            D = clustered_spectrum(rng, self.n, self.gap, 3.0 * self.scale,
                                   floor=ZERO_GAP if self.avoid_zero else 0.0)
        else:
            D = periodic_derivative_model(self.n)
        return away_from_zero(D) if self.avoid_zero else D
