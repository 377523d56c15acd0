"""Numba detection and the switch between compiled and pure-Python kernels.

Set ``KOSZULKIT_DISABLE_NUMBA=1`` to force the fallback path.
"""
import logging
import os

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("KOSZULKIT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by KOSZULKIT_DISABLE_NUMBA")
    import numba

    njit = numba.njit
    HAVE_NUMBA = True
except ImportError as exc:  # pragma: no cover - depends on environment
    logger.debug("numba unavailable (%s); using pure-Python kernels", exc)
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def use_numba():
    """True when the compiled kernels are active."""
    return HAVE_NUMBA
