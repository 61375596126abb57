"""Numba availability and the env switch for the pure-numpy fallback.

Set ``TAPSIM_DISABLE_NUMBA=1`` to force the numpy kernels.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
NUMBA_DISABLED = os.getenv("TAPSIM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, else identity."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def default_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
