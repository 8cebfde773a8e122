"""Backend selection for the hot numeric kernels.

Numba is used when it imports cleanly and ``QDPHONON_DISABLE_NUMBA`` is not
set to a truthy value. Otherwise every kernel runs on its pure-numpy twin.
"""

import os

_FLAG = "QDPHONON_DISABLE_NUMBA"


def _flag_set() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _flag_set()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
