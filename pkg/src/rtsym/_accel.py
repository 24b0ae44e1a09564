"""Backend selection for the compiled kernels.

Set ``RTSYM_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""
import os

_flag = os.environ.get("RTSYM_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not DISABLED_BY_ENV

JIT_OPTIONS = {"nogil": True, "cache": True}


def maybe_njit(func):
    """Compile ``func`` with numba when it is available, else return None."""
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(**JIT_OPTIONS)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
