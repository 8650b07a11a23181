"""Cross-entity heterogeneity analytics: Lorenz curve, top-q shares and
the empirical survival function of operation values.

Municipal records roll up into their parent state; records without a
parent are standalone entities.  Shares are computed with exact integer
or decimal arithmetic and floated only at the final division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .errors import DegenerateSeriesError, DomainError, EmptySelectionError
from .series import KINDS, OperationRecord

BASES = KINDS  # ("count", "volume")


def entity_totals(records: Sequence[OperationRecord], basis: str) -> dict[str, Decimal | int]:
    """Per-entity totals after the municipal -> state rollup."""
    if basis not in BASES:
        raise DomainError(f"basis must be one of {BASES}")
    if not records:
        raise EmptySelectionError("no records")
    totals: dict[str, Decimal | int] = {}
    for r in records:
        key = r.parent_state or r.entity_id
        if basis == "count":
            totals[key] = totals.get(key, 0) + 1
        else:
            totals[key] = totals.get(key, Decimal(0)) + r.value
    return totals


def top_share(records: Sequence[OperationRecord], basis: str, q: float) -> float:
    """Share of the basis held by the ceil(q*E) largest entities."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"top fraction must lie in (0, 1], got {q}")
    totals = sorted(entity_totals(records, basis).values(), reverse=True)
    grand = sum(totals)
    if grand <= 0:
        raise DegenerateSeriesError("entity totals sum to zero")
    k = math.ceil(q * len(totals))
    return float(Decimal(sum(totals[:k])) / Decimal(grand))


@dataclass(frozen=True)
class ConcentrationSummary:
    """Lorenz points over entities sorted ascending by total."""

    basis: str
    lorenz_points: tuple[tuple[float, float], ...]
    totals_desc: tuple

    def share_of_top(self, q: float) -> float:
        if not 0.0 < q <= 1.0:
            raise DomainError(f"top fraction must lie in (0, 1], got {q}")
        k = math.ceil(q * len(self.totals_desc))
        grand = sum(self.totals_desc)
        return float(Decimal(sum(self.totals_desc[:k])) / Decimal(grand))

    def gini(self) -> float:
        """1 - 2x the area under the piecewise-linear Lorenz curve."""
        area = 0.0
        pts = self.lorenz_points
        for (p0, l0), (p1, l1) in zip(pts[:-1], pts[1:]):
            area += (p1 - p0) * (l0 + l1) / 2.0
        return 1.0 - 2.0 * area


def lorenz(records: Sequence[OperationRecord], basis: str) -> ConcentrationSummary:
    """Full Lorenz curve of entity totals, starting at (0, 0)."""
    totals = sorted(entity_totals(records, basis).values())
    grand = sum(totals)
    if grand <= 0:
        raise DegenerateSeriesError("entity totals sum to zero")
    n = len(totals)
    points = [(0.0, 0.0)]
    running = totals[0] - totals[0]  # zero of the right type
    for k, v in enumerate(totals, start=1):
        running += v
        points.append((k / n, float(Decimal(running) / Decimal(grand))))
    return ConcentrationSummary(
        basis=basis,
        lorenz_points=tuple(points),
        totals_desc=tuple(sorted(totals, reverse=True)),
    )


@dataclass(frozen=True)
class CcdfPoints:
    """Empirical survival function P(V >= x) at the distinct values x."""

    thresholds: tuple[float, ...]
    survival: tuple[float, ...]
    excluded_zero_count: int


def ccdf(values: Sequence) -> CcdfPoints:
    """Survival function of positive values; zeros are excluded and counted."""
    positive = sorted(v for v in values if v > 0)
    excluded = len(values) - len(positive)
    if not positive:
        raise EmptySelectionError("no positive values")
    n = len(positive)
    thresholds: list[float] = []
    survival: list[float] = []
    seen = 0
    i = 0
    while i < n:
        x = positive[i]
        j = i
        while j < n and positive[j] == x:
            j += 1
        thresholds.append(float(x))
        survival.append((n - seen) / n)  # count of values >= x
        seen += j - i
        i = j
    return CcdfPoints(
        thresholds=tuple(thresholds),
        survival=tuple(survival),
        excluded_zero_count=excluded,
    )
