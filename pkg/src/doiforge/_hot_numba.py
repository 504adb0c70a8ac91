"""numba implementations of the hot kernels (see ``_hot_numpy`` for the fallback)."""
import math

import numpy as np
from numba import njit

_RESEED = 128


@njit(cache=True, nogil=True)
def _jacobi(a, max_sweeps, tol):
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real ** 2 + A[i, j].imag ** 2
    target = tol * math.sqrt(fro)
    sweeps = 0
    off = 0.0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j].real ** 2 + A[i, j].imag ** 2
        off = math.sqrt(off)
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
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                u = g / ag
                ub = u.conjugate()
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * ub * akq
                    A[k, q] = s * akp + c * ub * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * u * aqk
                    A[q, k] = s * apk + c * u * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * ub * vkq
                    V[k, q] = s * vkp + c * ub * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i].real
    return w, V, sweeps, off, target


def jacobi_eigh(a, max_sweeps, tol):
    return _jacobi(np.ascontiguousarray(a, dtype=np.complex128), max_sweeps, tol)


@njit(cache=True, nogil=True)
def _fourier(t0, h, wg, s):
    m = wg.shape[0]
    out = np.empty(s.shape[0], dtype=np.complex128)
    for k in range(s.shape[0]):
        sk = s[k]
        step = complex(math.cos(sk * h), -math.sin(sk * h))
        acc = 0.0 + 0.0j
        ph = 0.0 + 0.0j
        for j in range(m):
            if j % _RESEED == 0:
                ang = sk * (t0 + j * h)
                ph = complex(math.cos(ang), -math.sin(ang))
            acc += wg[j] * ph
            ph *= step
        out[k] = acc
    return out


def fourier_trapezoid(t0, h, wg, s):
    """Return ``sum_j wg[j] * exp(-i s t_j)`` with ``t_j = t0 + j h``."""
    return _fourier(float(t0), float(h), np.ascontiguousarray(wg, dtype=np.float64),
                    np.ascontiguousarray(s, dtype=np.float64))


@njit(cache=True, nogil=True)
def _holder(t, f, alpha, stride, band):
    n = t.shape[0]
    best = 0.0
    # every pair on the strided subsample
    for i in range(0, n, stride):
        for j in range(i + stride, n, stride):
            q = abs(f[j] - f[i]) / (t[j] - t[i]) ** alpha
            if q > best:
                best = q
    # short-range pairs on the full grid
    for i in range(n):
        for j in range(i + 1, min(n, i + band + 1)):
            q = abs(f[j] - f[i]) / (t[j] - t[i]) ** alpha
            if q > best:
                best = q
    return best


def holder_max(t, f, alpha, stride, band):
    return _holder(np.ascontiguousarray(t, dtype=np.float64),
                   np.ascontiguousarray(f, dtype=np.float64),
                   float(alpha), int(stride), int(band))
