"""Damped nonlinear least squares calibration of growth curves.

Levenberg-Marquardt on log-transformed parameters (all parameters are
positive; the saturation level is additionally kept above the largest
observation).  The damping factor starts at ``initial_damping`` and is
divided/multiplied by ``damping_growth`` on accepted/rejected steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateSeriesError,
    DomainError,
    InsufficientDataError,
    NumericalFailureError,
)
from .models import VARIANTS, GrowthParams, params_from_tag
from .series import CumulativeSeries

TIME_AXES = ("day_of_year", "shifted_zero")

# tags the fitter accepts; generalized must be requested explicitly and is
# never part of automatic model selection
FITTABLE_TAGS = ("logistic", "gompertz_strict", "gompertz_free", "generalized")
SELECTION_TAGS = ("logistic", "gompertz_free")

_M_ABOVE_DATA = 1.0 + 1e-6
_DAMPING_CEILING = 1e12
_THETA_CLIP = 300.0


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 200
    relative_residual_tolerance: float = 1e-10
    parameter_step_tolerance: float = 1e-12
    initial_damping: float = 1e-3
    damping_growth: float = 2.0
    time_axis: str = "day_of_year"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        for name in (
            "relative_residual_tolerance",
            "parameter_step_tolerance",
            "initial_damping",
        ):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be > 0")
        if self.damping_growth <= 1.0:
            raise DomainError("damping_growth must be > 1")
        if self.time_axis not in TIME_AXES:
            raise DomainError(f"time_axis must be one of {TIME_AXES}")


@dataclass(frozen=True)
class FitResult:
    params: GrowthParams
    r_squared: float
    residual_sum_squares: float
    iterations: int
    converged: bool
    covariance_diag: tuple[float, ...] | None
    rss_trace: tuple[float, ...]


@dataclass(frozen=True)
class SelectionResult:
    """Per-model fits plus the tag chosen on adherence."""

    results: dict[str, FitResult]
    chosen: str


def _check_tag(model: str) -> str:
    if model not in FITTABLE_TAGS:
        raise DomainError(f"unknown model {model!r}; expected one of {FITTABLE_TAGS}")
    return model


def fit_times(times: np.ndarray, model: str, time_axis: str) -> np.ndarray:
    """Map observation days onto the model's time axis.

    Only the free Gompertz form has a movable origin; the other variants
    carry their day-one anchoring internally and ignore the axis choice.
    """
    if time_axis not in TIME_AXES:
        raise DomainError(f"time_axis must be one of {TIME_AXES}")
    times = np.asarray(times, dtype=np.float64)
    if model == "gompertz_free" and time_axis == "shifted_zero":
        return times - 1.0
    return times


def _series_arrays(series: CumulativeSeries) -> tuple[np.ndarray, np.ndarray]:
    return series.times_array(), series.values_array()


def initial_guess(
    series: CumulativeSeries, model: str, time_axis: str = "day_of_year"
) -> GrowthParams:
    """Linearization-based starting point for `fit`.

    The saturation guess is 1.05x the largest observation.  Slope/intercept
    come from a least-squares line through the logit (logistic) or log-log
    (Gompertz) transform of N/m0, weighted to counter the transform's
    blow-up as observations approach m0.
    """
    model = _check_tag(model)
    t_obs, y = _series_arrays(series)
    if y.size < 4:
        raise InsufficientDataError(f"need >= 4 points, got {y.size}")
    if np.all(y == y[0]):
        raise DegenerateSeriesError("constant series")
    if y.max() <= 0.0:
        raise DegenerateSeriesError("series has no positive values")

    m0 = 1.05 * float(y.max())
    if model != "gompertz_free":
        m0 = max(m0, 1.0 + 1e-5)
    t = fit_times(t_obs, model, time_axis)
    mask = (y > 0.0) & (y < m0)
    if int(mask.sum()) < 4:
        raise InsufficientDataError("fewer than 4 usable points for the linearization")
    u = y[mask] / m0
    tm = t[mask]

    if model in ("logistic", "generalized"):
        z = np.log(u / (1.0 - u))
        wgt = (1.0 - u) ** 2
    else:
        z = np.log(-np.log(u))
        wgt = np.log(u) ** 2
    sw = np.sqrt(wgt)
    design = np.vstack([np.ones_like(tm), tm]).T * sw[:, None]
    coef, *_ = np.linalg.lstsq(design, z * sw, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])

    span = float(tm.max() - tm.min()) or 1.0
    if model in ("logistic", "generalized"):
        rate = slope if slope > 0.0 else 4.0 / span  # logit slope = w*m
        w0 = rate / m0
        if model == "logistic":
            return params_from_tag("logistic", (m0, w0))
        return params_from_tag("generalized", (m0, w0, 1.0))
    if model == "gompertz_strict":
        w0 = -slope if slope < 0.0 else 2.0 / span
        return params_from_tag("gompertz_strict", (m0, w0))
    c0 = -slope if slope < 0.0 else 2.0 / span
    b0 = math.exp(min(max(intercept, -_THETA_CLIP), _THETA_CLIP))
    return params_from_tag("gompertz_free", (m0, b0, c0))


def r_squared(
    series: CumulativeSeries, params: GrowthParams, time_axis: str = "day_of_year"
) -> float:
    """Coefficient of determination of `params` against the series."""
    t_obs, y = _series_arrays(series)
    if y.size == 0:
        raise DegenerateSeriesError("empty series")
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        raise DegenerateSeriesError("zero-variance series")
    t = fit_times(t_obs, params.tag, time_axis)
    pred = kernels.eval_curve(*params.kernel_args(), t)
    rss = float(np.sum((y - pred) ** 2))
    return 1.0 - rss / tss


def _m_floor(model: str, ymax: float) -> float:
    floor = _M_ABOVE_DATA * ymax
    if model != "gompertz_free":
        floor = max(floor, _M_ABOVE_DATA)
    return floor


def _to_theta(values: tuple[float, ...], m_floor: float) -> np.ndarray:
    head = max(values[0] - m_floor, 1e-12)
    return np.array([math.log(head)] + [math.log(v) for v in values[1:]])


def _from_theta(theta: np.ndarray, m_floor: float) -> np.ndarray:
    out = np.exp(theta)
    vals = out.copy()
    vals[0] = m_floor + out[0]
    return vals


def _kernel_args(model: str, vals: np.ndarray) -> tuple[int, float, float, float]:
    code = VARIANTS[model].code
    p2 = float(vals[2]) if vals.size > 2 else 0.0
    return code, float(vals[0]), float(vals[1]), p2


def fit(
    series: CumulativeSeries, model: str, opts: FitOptions = FitOptions()
) -> FitResult:
    """Calibrate `model` to the series; returns a flagged result rather
    than raising when the iteration budget runs out."""
    model = _check_tag(model)
    guess = initial_guess(series, model, opts.time_axis)
    t_obs, y = _series_arrays(series)
    t = fit_times(t_obs, model, opts.time_axis)
    m_floor = _m_floor(model, float(y.max()))

    theta = _to_theta(guess.free_values(), m_floor)

    def residual(th: np.ndarray) -> tuple[np.ndarray, float]:
        vals = _from_theta(th, m_floor)
        pred = kernels.eval_curve(*_kernel_args(model, vals), t)
        r = y - pred
        return r, float(np.dot(r, r))

    res, rss = residual(theta)
    if not math.isfinite(rss):
        raise NumericalFailureError("initial guess evaluates to non-finite residuals")

    lam = opts.initial_damping
    nu = opts.damping_growth
    trace = [rss]
    converged = False
    iterations = 0

    while iterations < opts.max_iterations:
        iterations += 1
        vals = _from_theta(theta, m_floor)
        jac_p = kernels.jac_curve(*_kernel_args(model, vals), t)
        # chain rule through the log/offset-log transform
        scale = np.exp(theta)
        jac = jac_p * scale[None, :]
        grad = jac.T @ res
        if float(np.max(np.abs(grad))) <= opts.relative_residual_tolerance * max(1.0, rss):
            converged = True
            break
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag <= 0.0] = max(float(diag.max()), 1e-30) * 1e-12

        delta = None
        if np.all(np.isfinite(jtj)) and np.all(np.isfinite(grad)):
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(diag), grad)
                if not np.all(np.isfinite(delta)):
                    delta = None
            except np.linalg.LinAlgError:
                delta = None
        if delta is None:
            lam *= nu
            if lam > _DAMPING_CEILING:
                raise NumericalFailureError(
                    "singular normal equations at the damping ceiling"
                )
            continue

        trial = np.clip(theta + delta, -_THETA_CLIP, _THETA_CLIP)
        step = float(np.max(np.abs(trial - theta)))
        if step <= opts.parameter_step_tolerance * (1.0 + float(np.max(np.abs(theta)))):
            converged = True
            break
        res_new, rss_new = residual(trial)
        if math.isfinite(rss_new) and rss_new < rss:
            improvement = rss - rss_new
            theta, res, rss = trial, res_new, rss_new
            trace.append(rss)
            lam = max(lam / nu, 1e-300)
            if rss == 0.0 or improvement <= opts.relative_residual_tolerance * rss:
                converged = True
                break
        else:
            lam *= nu
            if lam > _DAMPING_CEILING:
                break

    vals = _from_theta(theta, m_floor)
    params = params_from_tag(model, tuple(vals))
    cov = _covariance_diag(model, vals, t, rss, m_floor, theta)
    return FitResult(
        params=params,
        r_squared=r_squared(series, params, opts.time_axis),
        residual_sum_squares=rss,
        iterations=iterations,
        converged=converged,
        covariance_diag=cov,
        rss_trace=tuple(trace),
    )


def _covariance_diag(
    model: str,
    vals: np.ndarray,
    t: np.ndarray,
    rss: float,
    m_floor: float,
    theta: np.ndarray,
) -> tuple[float, ...] | None:
    npts, nfree = t.size, theta.size
    if npts <= nfree:
        return None
    jac = kernels.jac_curve(*_kernel_args(model, vals), t)
    try:
        cov = np.linalg.inv(jac.T @ jac) * (rss / (npts - nfree))
    except np.linalg.LinAlgError:
        return None
    d = np.diag(cov)
    if not np.all(np.isfinite(d)):
        return None
    return tuple(float(v) for v in d)


def select_model(
    series: CumulativeSeries, opts: FitOptions = FitOptions()
) -> SelectionResult:
    """Fit the logistic and free-Gompertz models; pick the higher R^2.

    Near-ties (|dR^2| < 1e-9) go to the model with fewer free parameters.
    A model whose fit raises is dropped; if every model fails, the last
    error propagates wrapped as a numerical failure.
    """
    results: dict[str, FitResult] = {}
    errors: list[Exception] = []
    for tag in SELECTION_TAGS:
        try:
            results[tag] = fit(series, tag, opts)
        except (NumericalFailureError, InsufficientDataError, DegenerateSeriesError) as exc:
            errors.append(exc)
    if not results:
        raise NumericalFailureError(f"all candidate fits failed: {errors}")
    chosen = choose_best({tag: r.r_squared for tag, r in results.items()})
    return SelectionResult(results=results, chosen=chosen)


def choose_best(r2_by_tag: dict[str, float]) -> str:
    """Higher R^2 wins; ties within 1e-9 go to the fewer-parameter model."""
    order = {tag: i for i, tag in enumerate(SELECTION_TAGS)}
    nparams = {tag: len(VARIANTS[tag].param_names) for tag in r2_by_tag}
    best = max(
        r2_by_tag,
        key=lambda tag: (r2_by_tag[tag], -nparams[tag], -order.get(tag, 99)),
    )
    for tag, r2 in r2_by_tag.items():
        if tag != best and abs(r2 - r2_by_tag[best]) < 1e-9:
            if nparams[tag] < nparams[best]:
                best = tag
    return best
