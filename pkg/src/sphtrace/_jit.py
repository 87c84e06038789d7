"""Backend switch for the hot kernels.

Every kernel in the package is written in the numba-compatible subset of
Python (scalars, tuples, numpy arrays).  When numba is importable and
``SPHTRACE_DISABLE_JIT`` is unset (or ``0``), kernels are compiled with
``numba.njit``; otherwise the very same source runs as plain Python over
numpy arrays.
"""

import os

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

_flag = os.environ.get("SPHTRACE_DISABLE_JIT", "0").strip().lower()
_want_jit = _flag in ("", "0", "false", "no")

try:
    if not _want_jit:
        raise ImportError("jit disabled by SPHTRACE_DISABLE_JIT")
    import numba

    JIT_ENABLED = True
except ImportError:
    numba = None
    JIT_ENABLED = False


if JIT_ENABLED:

    def njit(fn=None, **kwargs):
        opts = {"cache": True, "nogil": True}
        opts.update(kwargs)
        if fn is None:
            return numba.njit(**opts)
        return numba.njit(**opts)(fn)

    u64 = np.uint64

else:

    def njit(fn=None, **kwargs):
        if fn is None:
            return lambda f: f
        return fn

    def u64(x):
        # python ints never wrap; masking emulates uint64 arithmetic
        return int(x) & MASK64


BACKEND = "numba" if JIT_ENABLED else "python"
