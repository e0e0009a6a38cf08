"""Backend selection for the hot loops.

Set ``BESSELRIESZ_NO_NUMBA=1`` to force the pure-numpy code paths even when
numba is importable. The flag is read once at import time.
"""

import os

_FALSE = {"", "0", "false", "no", "off"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("BESSELRIESZ_NO_NUMBA", "0").strip().lower() in _FALSE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is present, identity decorator otherwise.

    Compilation is always attempted when numba is installed so that both
    backends stay testable side by side; ``USE_NUMBA`` only decides which
    one the public wrappers dispatch to.
    """
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
