"""Numba switch for the hot kernels.

Set ``WEALTHEX_DISABLE_NUMBA=1`` to force the pure-numpy code paths. When numba
is not importable the numpy paths are used as well.
"""

import os

_FLAG = "WEALTHEX_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def njit(func):
    """Compile ``func`` with numba if it is available, else return it untouched.

    The numpy fallbacks never call the undecorated loops, so an uncompiled
    kernel only runs when a test asks for it explicitly.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
