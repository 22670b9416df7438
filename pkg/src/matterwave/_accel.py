"""Numba toggle shared by the hot kernels.

Every accelerated kernel exists twice: a ``@njit`` version compiled by numba
and a vectorised numpy version.  Setting ``MATTERWAVE_NO_NUMBA=1`` in the
environment (before import) routes all public calls through the numpy path.
The numba versions are still compiled on demand when numba is importable, so
the benchmark can compare both inside one process.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("MATTERWAVE_NO_NUMBA", "").strip().lower() not in {
    "1", "true", "yes", "on"}


def njit(func=None, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` or a no-op when numba is missing."""
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)

    def wrap(f):
        if not HAVE_NUMBA:
            return f
        return numba.njit(**opts)(f)

    if func is not None:
        return wrap(func)
    return wrap


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
