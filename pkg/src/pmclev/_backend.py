"""Backend selection for the hot numeric kernels.

Kernels are compiled with numba unless ``PMCLEV_DISABLE_NUMBA`` is set to a
truthy value (``1``, ``true``, ``yes``) or numba cannot be imported, in which
case the pure-numpy implementations are used.
"""
import os

_FLAG = os.environ.get("PMCLEV_DISABLE_NUMBA", "").strip().lower()

try:
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` in nopython mode when the numba backend is active.

    The original Python function stays reachable through ``.py_func`` either
    way, so the interpreted path can always be tested against the compiled one.
    """
    if USE_NUMBA:
        return _numba.njit(cache=True)(func)
    func.py_func = func
    return func
