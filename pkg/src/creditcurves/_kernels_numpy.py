"""Pure-NumPy kernels: closed-form curves, parameter gradients, RK4 paths.

Reference implementation; semantics must match `_kernels_numba`.

Parameter packing (p0, p1, p2) by variant code:
  LOGISTIC         (m, w, unused)
  GOMPERTZ_STRICT  (m, w, unused)
  GOMPERTZ_FREE    (m, b, c)
  GENERALIZED      (m, w, n)

The algebraic forms are arranged so that the day-one initial condition
N(1) = 1 holds exactly in float64 for the logistic, strict-Gompertz and
generalized variants, and so that GENERALIZED with n = 1 is bit-identical
to LOGISTIC.
"""

import math

import numpy as np

from ._codes import EXP_CLAMP, GENERALIZED, GOMPERTZ_FREE, GOMPERTZ_STRICT, LOGISTIC


def _exp_arg(scale, dt):
    # -scale*dt clamped to +-EXP_CLAMP; the dt == 0 corner is pinned to 0
    # so an overflowing scale cannot poison the initial condition with NaN.
    with np.errstate(invalid="ignore", over="ignore"):
        x = -scale * dt
    x = np.where(dt == 0.0, 0.0, x)
    return np.clip(x, -EXP_CLAMP, EXP_CLAMP)


def eval_curve(kind, p0, p1, p2, t):
    """Evaluate the closed-form curve at each time in `t` (float64 array)."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):
        if kind == LOGISTIC:
            m, w = p0, p1
            e = np.exp(_exp_arg(w * m, t - 1.0))
            return m / (1.0 + (m - 1.0) * e)
        if kind == GOMPERTZ_STRICT:
            m, w = p0, p1
            return np.exp(-math.log(m) * np.expm1(_exp_arg(w, t - 1.0)))
        if kind == GOMPERTZ_FREE:
            m, b, c = p0, p1, p2
            inner = np.exp(np.clip(-c * t, -EXP_CLAMP, EXP_CLAMP))
            return m * np.exp(np.maximum(-b * inner, -EXP_CLAMP))
        if kind == GENERALIZED:
            m, w, n = p0, p1, p2
            q = m**n
            em = q - 1.0
            r = np.exp(_exp_arg(w * q, t - 1.0))
            return (q / (1.0 + em * r)) ** (1.0 / n)
    raise ValueError(f"unknown variant code {kind}")


def jac_curve(kind, p0, p1, p2, t):
    """Gradient of the curve w.r.t. its free parameters, shape (len(t), k).

    Column order matches the parameter packing: (m, w) for the two-parameter
    variants, (m, b, c) / (m, w, n) for the three-parameter ones.
    """
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        if kind == LOGISTIC:
            m, w = p0, p1
            dt = t - 1.0
            e = np.exp(_exp_arg(w * m, dt))
            d = 1.0 + (m - 1.0) * e
            out = np.empty((t.shape[0], 2))
            out[:, 0] = 1.0 / d - m * e * (1.0 - (m - 1.0) * w * dt) / (d * d)
            out[:, 1] = m * m * (m - 1.0) * dt * e / (d * d)
            return out
        if kind == GOMPERTZ_STRICT:
            m, w = p0, p1
            dt = t - 1.0
            x = _exp_arg(w, dt)
            e = np.exp(x)
            val = np.exp(-math.log(m) * np.expm1(x))
            out = np.empty((t.shape[0], 2))
            out[:, 0] = val / m * (1.0 - e)
            out[:, 1] = val * math.log(m) * e * dt
            return out
        if kind == GOMPERTZ_FREE:
            m, b, c = p0, p1, p2
            inner = np.exp(np.clip(-c * t, -EXP_CLAMP, EXP_CLAMP))
            val = m * np.exp(np.maximum(-b * inner, -EXP_CLAMP))
            out = np.empty((t.shape[0], 3))
            out[:, 0] = val / m
            out[:, 1] = -inner * val
            out[:, 2] = val * b * t * inner
            return out
        if kind == GENERALIZED:
            m, w, n = p0, p1, p2
            dt = t - 1.0
            q = m**n
            em = q - 1.0
            r = np.exp(_exp_arg(w * q, dt))
            d = 1.0 + em * r
            val = (q / d) ** (1.0 / n)
            lever = 1.0 - em * w * dt
            out = np.empty((t.shape[0], 3))
            out[:, 0] = val / m * (1.0 - q * r / d * lever)
            out[:, 1] = val / (n * d) * em * r * q * dt
            out[:, 2] = val * (np.log(d) / (n * n) - q * math.log(m) * r * lever / (n * d))
            return out
    raise ValueError(f"unknown variant code {kind}")


def _rhs(kind, p0, p1, p2, state):
    s = np.maximum(state, 1e-300)  # guards log/pow during RK4 stages
    if kind == LOGISTIC:
        return p1 * s * (p0 - s)
    if kind == GOMPERTZ_STRICT:
        return p1 * s * np.log(p0 / s)
    if kind == GOMPERTZ_FREE:
        return p2 * s * np.log(p0 / s)
    # GENERALIZED
    return p1 * s * (p0**p2 - s**p2) / p2


def rk4_curve_batch(kind, p0, p1, p2, m_eps, n0, grid, max_step):
    """Classic RK4 over a batch of parameter sets, landing exactly on `grid`.

    Each inter-grid segment is covered by ceil(span/max_step) equal
    sub-steps.  A step that reaches or crosses the saturation level clamps
    the state to one ulp below it and raises that row's `clamped` flag; a
    step that explodes below zero is rejected (state held) and flagged.

    Returns (values[batch, len(grid)], clamped[batch]).
    """
    nb = p0.shape[0]
    ng = grid.shape[0]
    out = np.empty((nb, ng))
    clamped = np.zeros(nb, dtype=bool)
    state = n0.astype(np.float64).copy()
    out[:, 0] = state
    for j in range(1, ng):
        span = float(grid[j] - grid[j - 1])
        nsub = max(1, math.ceil(span / max_step))
        h = span / nsub
        for _ in range(nsub):
            k1 = _rhs(kind, p0, p1, p2, state)
            k2 = _rhs(kind, p0, p1, p2, state + 0.5 * h * k1)
            k3 = _rhs(kind, p0, p1, p2, state + 0.5 * h * k2)
            k4 = _rhs(kind, p0, p1, p2, state + h * k3)
            new = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            hi = ~(new < p0)  # overshoot of the saturation level, or NaN
            lo = ~(new > 0.0) & ~hi  # blow-up below zero: hold and flag
            state = np.where(hi, m_eps, np.where(lo, state, new))
            bad = hi | lo
            if bad.any():
                clamped |= bad
        out[:, j] = state
    return out, clamped
