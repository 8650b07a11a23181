#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-NumPy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from creditcurves import _kernels_numpy as knp
from creditcurves._codes import GOMPERTZ_STRICT, LOGISTIC

try:
    from creditcurves import _kernels_numba as knb
except ImportError:
    knb = None

T_DENSE = np.linspace(1.0, 366.0, 4000)
T_WEEKLY = np.arange(1.0, 366.0, 7.0)  # the shape a fit iteration sees
GRID = np.arange(1.0, 367.0)
BATCH = 100
RNG = np.random.default_rng(0)
M = np.exp(RNG.uniform(np.log(20.0), np.log(5000.0), BATCH))
W = RNG.uniform(0.01, 0.3, BATCH) / M


def bench(fn, repeats, *args):
    fn(*args)  # warm-up (and JIT compile)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


WORKLOADS = [
    ("eval_curve  (logistic, 4000 pts)", "eval_curve", 200,
     (LOGISTIC, 300.0, 3e-4, 0.0, T_DENSE)),
    ("eval_curve  (gompertz, 4000 pts)", "eval_curve", 200,
     (GOMPERTZ_STRICT, 400.0, 0.03, 0.0, T_DENSE)),
    ("jac_curve   (logistic, 4000 pts)", "jac_curve", 200,
     (LOGISTIC, 300.0, 3e-4, 0.0, T_DENSE)),
    ("jac_curve   (gompertz, 4000 pts)", "jac_curve", 200,
     (GOMPERTZ_STRICT, 400.0, 0.03, 0.0, T_DENSE)),
    ("eval_curve  (weekly series, 53 pts)", "eval_curve", 2000,
     (GOMPERTZ_STRICT, 400.0, 0.03, 0.0, T_WEEKLY)),
    ("jac_curve   (weekly series, 53 pts)", "jac_curve", 2000,
     (GOMPERTZ_STRICT, 400.0, 0.03, 0.0, T_WEEKLY)),
    ("rk4 batch   (100 curves x 1 yr)", "rk4_curve_batch", 5,
     (LOGISTIC, M, W, np.zeros(BATCH), np.nextafter(M, 0.0), np.ones(BATCH),
      GRID, 0.05)),
]


def main():
    print(f"{'workload':38s} {'numpy':>10s} {'numba':>10s} {'speedup':>9s}")
    for label, name, repeats, args in WORKLOADS:
        t_np = bench(getattr(knp, name), repeats, *args)
        if knb is None:
            print(f"{label:38s} {t_np * 1e3:8.2f}ms {'n/a':>10s} {'n/a':>9s}")
            continue
        t_nb = bench(getattr(knb, name), repeats, *args)
        print(
            f"{label:38s} {t_np * 1e3:8.2f}ms {t_nb * 1e3:8.2f}ms "
            f"{t_np / t_nb:8.1f}x"
        )
        ref = getattr(knp, name)(*args)
        got = getattr(knb, name)(*args)
        if isinstance(ref, tuple):
            ref, got = ref[0], got[0]
        assert np.allclose(ref, got, rtol=1e-10), f"backend mismatch in {name}"
    if knb is None:
        print("numba unavailable; fallback only")


if __name__ == "__main__":
    main()
