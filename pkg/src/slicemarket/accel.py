"""Optional numba acceleration for the hot decision kernels.

The admission kernels are plain numpy functions that numba can compile in
nopython mode. When numba is importable and ``SLICEMARKET_NO_NUMBA`` is not
set, :func:`maybe_jit` wraps them with ``@njit(cache=True)``; otherwise the
undecorated function runs as-is. Either path produces identical results
(see tests/test_accel.py and benchmarks/bench_kernels.py).
"""

import os

NUMBA_ENV_FLAG = "SLICEMARKET_NO_NUMBA"

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA and not os.environ.get(NUMBA_ENV_FLAG)


def maybe_jit(fn):
    """Compile ``fn`` with numba unless the fallback path is selected."""
    if USING_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
