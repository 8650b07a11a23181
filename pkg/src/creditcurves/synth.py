"""Synthetic scenario generator.

Stands in for the non-redistributable source data: events whose aggregate
follows a configured growth curve, Zipf-weighted entities, log-normal
monetary values and an optional rejection rate.

All randomness comes from a single PCG64 stream (seeded, documented,
platform independent) consumed as uniform doubles; every variate is
produced by inverse transform, so a (config, seed) pair pins the output
byte for byte under a fixed NumPy version.  Draw order: event days,
entities, values, statuses.
"""

from __future__ import annotations

import calendar
import datetime as dt
from dataclasses import dataclass
from decimal import Decimal

import numpy as np
from scipy.special import ndtri

from .errors import DomainError
from .models import GrowthParams, TimeGrid, eval_params
from .series import CumulativeSeries, OperationRecord


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario for `generate_events`.

    `entity_weight_exponent` is the Zipf exponent over entity ranks;
    value_log_mean/sd parameterize the log-normal monetary values in log
    space.  `observation_noise_sd` is kept as a fraction of the saturation
    level for workflows that sample noisy observation curves of the same
    scenario via `sample_curve` (pass noise_sd = observation_noise_sd * m).
    """

    year: int
    params: GrowthParams
    total_pleas: int
    entity_count: int
    entity_weight_exponent: float = 1.2
    value_log_mean: float = 13.0
    value_log_sd: float = 1.5
    rejection_rate: float = 0.0
    observation_noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.entity_count < 1:
            raise DomainError("entity_count must be >= 1")
        if self.total_pleas < self.entity_count:
            raise DomainError("total_pleas must be >= entity_count")
        if not 0.0 <= self.rejection_rate < 1.0:
            raise DomainError("rejection_rate must lie in [0, 1)")
        if self.value_log_sd <= 0.0:
            raise DomainError("value_log_sd must be > 0")
        if self.observation_noise_sd < 0.0:
            raise DomainError("observation_noise_sd must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


def days_in_year(year: int) -> int:
    return 366 if calendar.isleap(year) else 365


def _event_day_cdf(params: GrowthParams, last_day: int) -> np.ndarray:
    days = np.arange(1.0, last_day + 0.5)
    curve = eval_params(params, days)
    span = curve[-1] - curve[0]
    if span <= 0.0:
        raise DomainError("growth curve is flat over the year")
    return (curve - curve[0]) / span


def generate_events(cfg: ScenarioConfig) -> list[OperationRecord]:
    """Draw `total_pleas` operation records for the configured scenario.

    Event days are inverse-transform samples of the normalized yearly
    increment of the growth curve; entities follow a Zipf law over ranks;
    values are log-normal, quantized to cents.
    """
    last_day = days_in_year(cfg.year)
    day_cdf = _event_day_cdf(cfg.params, last_day)

    ranks = np.arange(1, cfg.entity_count + 1, dtype=np.float64)
    weights = ranks ** (-cfg.entity_weight_exponent)
    entity_cdf = np.cumsum(weights)
    entity_cdf /= entity_cdf[-1]

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.total_pleas
    u_day = rng.random(n)
    u_entity = rng.random(n)
    u_value = rng.random(n)
    u_status = rng.random(n)

    days = np.searchsorted(day_cdf, u_day, side="left") + 1
    entities = np.searchsorted(entity_cdf, u_entity, side="left") + 1
    values = np.exp(cfg.value_log_mean + cfg.value_log_sd * ndtri(u_value))
    rejected = u_status < cfg.rejection_rate

    width = max(2, len(str(cfg.entity_count)))
    jan1 = dt.date(cfg.year, 1, 1)
    order = np.argsort(days, kind="stable")
    records = []
    for i in order:
        records.append(
            OperationRecord(
                date=jan1 + dt.timedelta(days=int(days[i]) - 1),
                entity_id=f"E{int(entities[i]):0{width}d}",
                parent_state=None,
                value=Decimal(f"{values[i]:.2f}"),
                status="rejected" if rejected[i] else "assented",
            )
        )
    return records


def sample_curve(
    params: GrowthParams,
    grid: TimeGrid,
    noise_sd: float,
    seed: int,
    *,
    year: int = 2014,
    kind: str = "count",
    scope: str = "all_pleas",
) -> CumulativeSeries:
    """Closed-form curve at the grid points plus Gaussian observation noise.

    Noisy samples are rectified to a nondecreasing path by running maximum
    and floored at zero so the result is a valid cumulative series.
    """
    if noise_sd < 0.0:
        raise DomainError("noise_sd must be >= 0")
    values = np.asarray(eval_params(params, grid.points), dtype=np.float64)
    if noise_sd > 0.0:
        rng = np.random.Generator(np.random.PCG64(seed))
        values = values + noise_sd * ndtri(rng.random(values.size))
    values = np.maximum.accumulate(values)
    values = np.clip(values, 0.0, None)
    return CumulativeSeries(
        year=year,
        kind=kind,
        scope=scope,
        times=tuple(float(t) for t in grid.points),
        values=tuple(float(v) for v in values),
    )
