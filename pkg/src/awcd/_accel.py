"""Backend switch for the numeric kernels.

Set ``AWCD_DISABLE_NUMBA=1`` to force the pure-numpy implementations.  The
flag is read once at import time; :func:`use_numba` can override it later
(used by tests and the benchmark).
"""
import os

try:
    import numba
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _env_disabled():
    return os.environ.get("AWCD_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


_ENABLED = HAVE_NUMBA and not _env_disabled()


def numba_enabled():
    return _ENABLED


def use_numba(flag):
    """Select the numba kernels (True) or the numpy fallbacks (False).

    Returns the previous setting so callers can restore it.
    """
    global _ENABLED
    previous = _ENABLED
    _ENABLED = bool(flag) and HAVE_NUMBA
    return previous
