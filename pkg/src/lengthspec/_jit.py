"""numba switch.

Set ``LENGTHSPEC_NO_NUMBA=1`` before import to run every kernel as plain
Python/numpy.  The kernels are written in the subset of Python that numba
compiles, so both paths execute the same source.
"""
import os
import warnings

_disabled = os.environ.get("LENGTHSPEC_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


def _nop_decorator(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def decorator(func):
        return func
    return decorator


if _disabled:
    HAVE_NUMBA = False
    njit = _nop_decorator
    prange = range
else:
    try:
        from numba import njit, prange
        HAVE_NUMBA = True
        warnings.filterwarnings("ignore", message="The TBB threading layer")
    except ImportError:  # pragma: no cover
        warnings.warn("numba not importable; kernels run as plain Python (slow)")
        HAVE_NUMBA = False
        njit = _nop_decorator
        prange = range


def set_workers(n):
    """Cap the number of numba threads; no-op on the Python path."""
    if not HAVE_NUMBA or n is None:
        return
    import numba
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def default_workers():
    env = os.environ.get("LENGTHSPEC_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
