"""Shared fixtures and oracle helpers."""

import numpy as np
import pytest

from creditcurves import kernels, models


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Trigger JIT compilation outside any timed section.
    t = np.array([1.0, 2.0, 3.0])
    for code in (
        kernels.LOGISTIC,
        kernels.GOMPERTZ_STRICT,
        kernels.GOMPERTZ_FREE,
        kernels.GENERALIZED,
    ):
        kernels.eval_curve(code, 100.0, 0.05, 1.0, t)
        kernels.jac_curve(code, 100.0, 0.05, 1.0, t)
        kernels.rk4_curve_batch(
            code,
            np.array([100.0]),
            np.array([0.05]),
            np.array([1.0]),
            np.array([np.nextafter(100.0, 0.0)]),
            np.array([1.0]),
            t,
            0.05,
        )


def finite_difference_gradient(
    params: models.GrowthParams, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient oracle, step h = 1e-6 * max(1, |theta|).

    Returns (gradient, steps); the steps bound the oracle's own roundoff
    resolution, about eps * m / h per component.
    """
    values = list(params.free_values())
    out = np.empty(len(values))
    steps = np.empty(len(values))
    for j, theta in enumerate(values):
        h = 1e-6 * max(1.0, abs(theta))
        hi = values.copy()
        lo = values.copy()
        hi[j] = theta + h
        lo[j] = theta - h
        f_hi = models.eval_params(models.params_from_tag(params.tag, hi), t)
        f_lo = models.eval_params(models.params_from_tag(params.tag, lo), t)
        out[j] = (f_hi - f_lo) / (2.0 * h)
        steps[j] = h
    return out, steps


def assert_gradient_matches(params: models.GrowthParams, t: float, rtol: float = 1e-6):
    analytic = np.asarray(models.jacobian(params, t), dtype=float)
    numeric, steps = finite_difference_gradient(params, t)
    for a, f, h in zip(analytic, numeric, steps):
        # atol term: the difference quotient cannot resolve below the
        # rounding noise of the curve values themselves
        tol = rtol * max(abs(a), abs(f)) + 4.0 * 2.2e-16 * params.m / h
        assert abs(a - f) <= tol, (
            f"{params}: t={t} analytic={analytic} fd={numeric}"
        )
