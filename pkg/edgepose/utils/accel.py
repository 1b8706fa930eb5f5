"""
JIT shim for the numeric kernels.

Kernels are written once against numba's ``njit``/``prange``. When numba is
not installed the decorators become no-ops and the kernels run as plain
Python loops (correct, but far slower).
"""

try:
    from numba import njit, prange
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator

    def prange(*args):
        return range(*args)


__all__ = ["njit", "prange", "NUMBA_AVAILABLE"]
