"""Backend selection for the hot numeric kernels.

``QUASIFREE_BACKEND=numpy`` forces the pure-numpy code paths; the default is
``numba`` whenever it can be imported.  ``QUASIFREE_THREADS`` sets the numba
thread pool size.
"""
import os

_requested = os.environ.get("QUASIFREE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"QUASIFREE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # tbb builds on some systems are too old and only produce warnings
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"

if HAVE_NUMBA and os.environ.get("QUASIFREE_THREADS"):
    numba.set_num_threads(int(os.environ["QUASIFREE_THREADS"]))


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range
