"""Pure-numpy implementations of the hot kernels.

Same algorithms as ``_hot_numba``; loops that numba compiles are vectorized
here along one axis instead.
"""
import math

import numpy as np


def jacobi_eigh(a, max_sweeps, tol):
    A = np.array(a, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    target = tol * math.sqrt(float(np.sum(np.abs(A) ** 2)))
    offmask = ~np.eye(n, dtype=bool)
    sweeps = 0
    while True:
        off = math.sqrt(float(np.sum(np.abs(A[offmask]) ** 2)))
        if off <= target or sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p, q]
                ag = abs(g)
                if ag == 0.0:
                    continue
                tau = (A[q, q].real - A[p, p].real) / (2.0 * ag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                u = g / ag
                ub = u.conjugate()
                colp = A[:, p].copy()
                A[:, p] = c * colp - s * ub * A[:, q]
                A[:, q] = s * colp + c * ub * A[:, q]
                rowp = A[p, :].copy()
                A[p, :] = c * rowp - s * u * A[q, :]
                A[q, :] = s * rowp + c * u * A[q, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * ub * V[:, q]
                V[:, q] = s * vp + c * ub * V[:, q]
    return np.real(np.diag(A)).copy(), V, sweeps, off, target


def fourier_trapezoid(t0, h, wg, s, chunk=256):
    """Return ``sum_j wg[j] * exp(-i s t_j)`` with ``t_j = t0 + j h``."""
    wg = np.asarray(wg, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    t = t0 + h * np.arange(wg.shape[0])
    out = np.empty(s.shape[0], dtype=np.complex128)
    for k in range(0, s.shape[0], chunk):
        sk = s[k:k + chunk]
        out[k:k + chunk] = np.exp(-1j * np.outer(sk, t)) @ wg
    return out


def holder_max(t, f, alpha, stride, band):
    t = np.asarray(t, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    best = 0.0
    ts, fs = t[::stride], f[::stride]
    for i in range(ts.shape[0] - 1):
        q = np.abs(fs[i + 1:] - fs[i]) / (ts[i + 1:] - ts[i]) ** alpha
        best = max(best, float(q.max()))
    for d in range(1, min(band, t.shape[0] - 1) + 1):
        q = np.abs(f[d:] - f[:-d]) / (t[d:] - t[:-d]) ** alpha
        best = max(best, float(q.max()))
    return best
