"""Numba-JIT kernels; drop-in replacements for `_kernels_numpy`.

Scalar inner loops compiled with @njit(cache=True).  No fastmath: the
exactness guarantees (N(1) = 1, n = 1 bit-identity with the logistic)
depend on strict IEEE semantics.
"""

import math

import numpy as np
from numba import njit

from ._codes import EXP_CLAMP, GOMPERTZ_FREE, GOMPERTZ_STRICT, LOGISTIC


@njit(cache=True, inline="always")
def _exp_arg(scale, dt):
    if dt == 0.0:
        return 0.0
    x = -scale * dt
    if x != x:
        x = 0.0
    if x > EXP_CLAMP:
        return EXP_CLAMP
    if x < -EXP_CLAMP:
        return -EXP_CLAMP
    return x


@njit(cache=True)
def eval_curve(kind, p0, p1, p2, t):
    n = t.shape[0]
    out = np.empty(n)
    if kind == LOGISTIC:
        m, w = p0, p1
        for i in range(n):
            e = math.exp(_exp_arg(w * m, t[i] - 1.0))
            out[i] = m / (1.0 + (m - 1.0) * e)
    elif kind == GOMPERTZ_STRICT:
        m, w = p0, p1
        lm = math.log(m)
        for i in range(n):
            out[i] = math.exp(-lm * math.expm1(_exp_arg(w, t[i] - 1.0)))
    elif kind == GOMPERTZ_FREE:
        m, b, c = p0, p1, p2
        for i in range(n):
            x = -c * t[i]
            if x > EXP_CLAMP:
                x = EXP_CLAMP
            elif x < -EXP_CLAMP:
                x = -EXP_CLAMP
            arg = -b * math.exp(x)
            if arg < -EXP_CLAMP:
                arg = -EXP_CLAMP
            out[i] = m * math.exp(arg)
    else:  # GENERALIZED
        m, w, nn = p0, p1, p2
        q = m**nn
        em = q - 1.0
        inv = 1.0 / nn
        for i in range(n):
            r = math.exp(_exp_arg(w * q, t[i] - 1.0))
            out[i] = (q / (1.0 + em * r)) ** inv
    return out


@njit(cache=True)
def jac_curve(kind, p0, p1, p2, t):
    n = t.shape[0]
    if kind == LOGISTIC:
        m, w = p0, p1
        out = np.empty((n, 2))
        for i in range(n):
            dt = t[i] - 1.0
            e = math.exp(_exp_arg(w * m, dt))
            d = 1.0 + (m - 1.0) * e
            out[i, 0] = 1.0 / d - m * e * (1.0 - (m - 1.0) * w * dt) / (d * d)
            out[i, 1] = m * m * (m - 1.0) * dt * e / (d * d)
        return out
    if kind == GOMPERTZ_STRICT:
        m, w = p0, p1
        lm = math.log(m)
        out = np.empty((n, 2))
        for i in range(n):
            dt = t[i] - 1.0
            x = _exp_arg(w, dt)
            e = math.exp(x)
            val = math.exp(-lm * math.expm1(x))
            out[i, 0] = val / m * (1.0 - e)
            out[i, 1] = val * lm * e * dt
        return out
    if kind == GOMPERTZ_FREE:
        m, b, c = p0, p1, p2
        out = np.empty((n, 3))
        for i in range(n):
            x = -c * t[i]
            if x > EXP_CLAMP:
                x = EXP_CLAMP
            elif x < -EXP_CLAMP:
                x = -EXP_CLAMP
            inner = math.exp(x)
            arg = -b * inner
            if arg < -EXP_CLAMP:
                arg = -EXP_CLAMP
            val = m * math.exp(arg)
            out[i, 0] = val / m
            out[i, 1] = -inner * val
            out[i, 2] = val * b * t[i] * inner
        return out
    # GENERALIZED
    m, w, nn = p0, p1, p2
    q = m**nn
    em = q - 1.0
    lm = math.log(m)
    out = np.empty((n, 3))
    for i in range(n):
        dt = t[i] - 1.0
        r = math.exp(_exp_arg(w * q, dt))
        d = 1.0 + em * r
        val = (q / d) ** (1.0 / nn)
        lever = 1.0 - em * w * dt
        out[i, 0] = val / m * (1.0 - q * r / d * lever)
        out[i, 1] = val / (nn * d) * em * r * q * dt
        out[i, 2] = val * (math.log(d) / (nn * nn) - q * lm * r * lever / (nn * d))
    return out


@njit(cache=True, inline="always")
def _rhs(kind, p0, p1, p2, state):
    s = state if state > 1e-300 else 1e-300
    if kind == LOGISTIC:
        return p1 * s * (p0 - s)
    if kind == GOMPERTZ_STRICT:
        return p1 * s * math.log(p0 / s)
    if kind == GOMPERTZ_FREE:
        return p2 * s * math.log(p0 / s)
    return p1 * s * (p0**p2 - s**p2) / p2


@njit(cache=True)
def rk4_curve_batch(kind, p0, p1, p2, m_eps, n0, grid, max_step):
    nb = p0.shape[0]
    ng = grid.shape[0]
    out = np.empty((nb, ng))
    clamped = np.zeros(nb, dtype=np.bool_)
    for i in range(nb):
        m, a, b = p0[i], p1[i], p2[i]
        state = n0[i]
        out[i, 0] = state
        for j in range(1, ng):
            span = grid[j] - grid[j - 1]
            nsub = int(math.ceil(span / max_step))
            if nsub < 1:
                nsub = 1
            h = span / nsub
            for _ in range(nsub):
                k1 = _rhs(kind, m, a, b, state)
                k2 = _rhs(kind, m, a, b, state + 0.5 * h * k1)
                k3 = _rhs(kind, m, a, b, state + 0.5 * h * k2)
                k4 = _rhs(kind, m, a, b, state + h * k3)
                new = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                if not (new < m):  # overshoot of the saturation level, or NaN
                    state = m_eps[i]
                    clamped[i] = True
                elif not (new > 0.0):  # blow-up below zero: hold and flag
                    clamped[i] = True
                else:
                    state = new
            out[i, j] = state
    return out, clamped
