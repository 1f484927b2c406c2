"""Kernel backend selection.

Hot inner loops ship in two functionally identical flavours: numba
``@njit`` kernels and plain numpy/python fallbacks.  The fallback is
selected by setting the environment variable ``DNAOTP_DISABLE_NUMBA=1``
before import; it exists for environments without a working numba and
as an independent correctness reference for the benchmark suite.
"""

import os

DISABLE_NUMBA = os.environ.get("DNAOTP_DISABLE_NUMBA", "") not in ("", "0")

if not DISABLE_NUMBA:
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLE_NUMBA


def njit_if_enabled(*args, **kwargs):
    """Return numba.njit decorator when enabled, identity otherwise."""
    if USE_NUMBA:
        import numba
        return numba.njit(*args, cache=True, **kwargs)

    def deco(fn):
        return fn

    return deco


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
