"""numba shim: set TSPD_PURE_PYTHON=1 to run every kernel as plain Python."""

from __future__ import annotations

import os

__all__ = ["njit", "JIT_ENABLED"]

JIT_ENABLED = not os.environ.get("TSPD_PURE_PYTHON")

if JIT_ENABLED:
    import numba

    def njit(func):
        # fastmath stays off: kernels must keep strict IEEE semantics so their
        # results line up with the pure-Python evaluation paths.
        return numba.njit(cache=True, fastmath=False)(func)

else:

    def njit(func):
        return func
