"""Numba switch.

Set ``REUSEMAGIC_DISABLE_NUMBA=1`` to force the pure-numpy kernels. Numba is
also skipped silently when it cannot be imported.
"""

import logging
import os

logger = logging.getLogger(__name__)

_disabled = os.environ.get("REUSEMAGIC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError("disabled by REUSEMAGIC_DISABLE_NUMBA")
    import numba

    njit = numba.njit
    HAVE_NUMBA = True
except ImportError as exc:
    logger.debug("numba unavailable (%s); using numpy kernels", exc)

    def njit(pyfunc=None, **kwargs):
        """No-op stand-in for ``numba.njit``."""
        def wrap(func):
            return func
        return wrap if pyfunc is None else wrap(pyfunc)

    HAVE_NUMBA = False
