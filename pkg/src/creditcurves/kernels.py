"""Kernel backend selection.

The numba backend is used when available; set CREDITCURVES_DISABLE_NUMBA=1
to force the pure-NumPy fallback.  Both backends expose the same functions
with the same contracts; `benchmarks/bench_kernels.py` compares them.
"""

import os

from ._codes import EXP_CLAMP, GENERALIZED, GOMPERTZ_FREE, GOMPERTZ_STRICT, LOGISTIC

__all__ = [
    "LOGISTIC",
    "GOMPERTZ_STRICT",
    "GOMPERTZ_FREE",
    "GENERALIZED",
    "EXP_CLAMP",
    "BACKEND",
    "eval_curve",
    "jac_curve",
    "rk4_curve_batch",
]


def _numba_disabled() -> bool:
    return os.environ.get("CREDITCURVES_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


if _numba_disabled():
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"

eval_curve = _impl.eval_curve
jac_curve = _impl.jac_curve
rk4_curve_batch = _impl.rk4_curve_batch
