"""Numba switch.

Set ``CFET_DISABLE_NUMBA=1`` (or run without numba installed) to use the
pure-numpy versions of the kernels in :mod:`cfet.kernels`.
"""
import os

_DISABLED = os.environ.get("CFET_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def jit(func):
    """``numba.njit(cache=True)`` when enabled, otherwise the function itself."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


BACKEND = "numba" if HAVE_NUMBA else "numpy"
