"""Backend selection for the hot kernels.

Set ``GAZEBENCH_DISABLE_NUMBA=1`` to force the vectorised numpy path even
when numba is importable.
"""
import os

_DISABLED = os.environ.get("GAZEBENCH_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
