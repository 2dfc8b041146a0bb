"""Kernel backend selection.

Hot loops live in ``_kernels.py`` as plain Python functions written in
nopython-compatible style.  By default they are compiled with numba
(``njit(cache=True, nogil=True)``); setting the environment variable
``SPREADLAB_BACKEND=python`` before import keeps the interpreted versions,
which compute identical results (slowly).  ``SPREADLAB_BACKEND=numba`` forces
compilation and raises if numba is unavailable.
"""

import os

_choice = os.environ.get("SPREADLAB_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "python"):
    raise RuntimeError(f"SPREADLAB_BACKEND must be auto|numba|python, got {_choice!r}")

USING_NUMBA = False
_njit = None

if _choice in ("auto", "numba"):
    try:
        from numba import njit as _njit  # noqa: F401

        USING_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise
        USING_NUMBA = False

BACKEND_NAME = "numba" if USING_NUMBA else "python"


def compile_kernel(func):
    """Return the accelerated version of a kernel, or the function itself."""
    if USING_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


# Worker count for the ThreadPoolExecutor fan-outs (normality scans, Sperner
# line scans).  Kernels are nogil so threads give real parallelism under numba;
# under the python backend the pool still works, just without speedup.
THREADS = 4


def set_threads(k: int) -> None:
    global THREADS
    if k < 1:
        raise ValueError("thread count must be >= 1")
    THREADS = int(k)
