"""The numba kernels and the numpy fallback must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from doiforge import _hot_numpy
from doiforge._backend import BACKEND

from conftest import random_hermitian

numba_mod = pytest.importorskip("doiforge._hot_numba")


@pytest.mark.parametrize("n", [1, 3, 8, 20])
def test_jacobi_agree(rng, n):
    A = random_hermitian(rng, n)
    w1, V1, *_ = numba_mod.jacobi_eigh(A.copy(), 100, 1e-13)
    w2, V2, *_ = _hot_numpy.jacobi_eigh(A.copy(), 100, 1e-13)
    np.testing.assert_allclose(np.sort(w1), np.sort(w2), atol=1e-11)
    for w, V in ((w1, V1), (w2, V2)):
        assert np.linalg.norm((V * w) @ V.conj().T - A, 2) <= 1e-11


def test_fourier_agree(rng):
    wg = rng.standard_normal(501)
    s = np.linspace(-5, 5, 77)
    a = numba_mod.fourier_trapezoid(-5.0, 0.02, wg, s)
    b = _hot_numpy.fourier_trapezoid(-5.0, 0.02, wg, s)
    t = -5.0 + 0.02 * np.arange(501)
    ref = np.exp(-1j * np.outer(s, t)) @ wg
    np.testing.assert_allclose(a, ref, atol=1e-10)
    np.testing.assert_allclose(b, ref, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_holder_agree(rng, alpha):
    t = np.linspace(-3, 3, 700)
    f = np.sin(3 * t) + 0.1 * rng.standard_normal(t.size)
    a = numba_mod.holder_max(t, f, alpha, 7, 16)
    b = _hot_numpy.holder_max(t, f, alpha, 7, 16)
    assert a == pytest.approx(b, rel=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, DOIFORGE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import doiforge; print(doiforge.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert BACKEND in ("numba", "numpy")
