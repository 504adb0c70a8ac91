"""Backend selection for the hot numeric kernels.

Set ``DOIFORGE_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
Both paths implement the same algorithms and are cross-checked in the tests.
"""
import os

_FLAG = os.environ.get("DOIFORGE_DISABLE_NUMBA", "").strip().lower()

try:  # pragma: no cover - depends on the environment
    import numba  # noqa: F401
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _FLAG not in {"1", "true", "yes", "on"}

if USE_NUMBA:
    from . import _hot_numba as _impl
else:
    from . import _hot_numpy as _impl

BACKEND = "numba" if USE_NUMBA else "numpy"

jacobi_eigh = _impl.jacobi_eigh
fourier_trapezoid = _impl.fourier_trapezoid
holder_max = _impl.holder_max
