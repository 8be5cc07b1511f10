"""JIT selection layer.

Hot kernels are compiled with numba by default.  Setting the environment
variable ``QCTRANS_NO_NUMBA=1`` (or ``true``/``yes``/``on``) makes ``njit`` a
no-op so the identical source runs as plain Python/numpy; results are the
same, only slower.  The flag is read once at import time.
"""

import os


def _disabled() -> bool:
    flag = os.environ.get("QCTRANS_NO_NUMBA", "").strip().lower()
    return flag in {"1", "true", "yes", "on"}


NUMBA_ENABLED = not _disabled()

if NUMBA_ENABLED:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False


def njit(fn):
    """Compile ``fn`` with numba (nogil, cached) or return it unchanged."""
    if NUMBA_ENABLED:
        return _numba_njit(cache=True, nogil=True)(fn)
    return fn
