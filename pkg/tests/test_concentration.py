"""Lorenz/top-share statistics and the value survival function."""

import datetime as dt
import math
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditcurves import concentration
from creditcurves.errors import DegenerateSeriesError, DomainError, EmptySelectionError
from creditcurves.series import OperationRecord


def make_records(counts_by_entity=None, volumes_by_entity=None, parent=None):
    records = []
    day = 0
    if counts_by_entity:
        for entity, count in counts_by_entity.items():
            for _ in range(count):
                day += 1
                records.append(
                    OperationRecord(
                        date=dt.date(2014, 1, 1) + dt.timedelta(days=day % 300),
                        entity_id=entity,
                        parent_state=parent,
                        value=Decimal("1.00"),
                        status="assented",
                    )
                )
    if volumes_by_entity:
        for entity, value in volumes_by_entity.items():
            day += 1
            records.append(
                OperationRecord(
                    date=dt.date(2014, 1, 1) + dt.timedelta(days=day % 300),
                    entity_id=entity,
                    parent_state=parent,
                    value=Decimal(value),
                    status="assented",
                )
            )
    return records


def brute_force_top_share(totals, q):
    ordered = sorted(totals, reverse=True)
    k = math.ceil(q * len(ordered))
    return float(sum(ordered[:k]) / sum(ordered))


class TestTopShare:
    def test_pareto_counts_toy(self):
        records = make_records({"A": 80, "B": 5, "C": 5, "D": 5, "E": 5})
        got = concentration.top_share(records, "count", 0.2)
        assert got == brute_force_top_share([80, 5, 5, 5, 5], 0.2) == 0.8

    def test_pareto_volume_toy(self):
        records = make_records(
            volumes_by_entity={"A": "40", "B": "15", "C": "15", "D": "15", "E": "15"}
        )
        got = concentration.top_share(records, "volume", 0.2)
        assert got == brute_force_top_share([40, 15, 15, 15, 15], 0.2) == 0.4

    def test_single_entity_any_q(self):
        records = make_records({"A": 7})
        for q in (0.01, 0.2, 1.0):
            assert concentration.top_share(records, "count", q) == 1.0

    def test_full_fraction_is_one(self):
        records = make_records({"A": 3, "B": 9, "C": 1})
        assert concentration.top_share(records, "count", 1.0) == 1.0

    def test_q_out_of_range(self):
        records = make_records({"A": 1})
        for q in (0.0, -0.5, 1.5):
            with pytest.raises(DomainError):
                concentration.top_share(records, "count", q)

    def test_empty_records(self):
        with pytest.raises(EmptySelectionError):
            concentration.top_share([], "count", 0.2)

    def test_municipal_rollup(self):
        state = make_records({"SP": 10})
        municipal = make_records({"M-001": 30}, parent="SP")
        other = make_records({"RJ": 10})
        records = state + municipal + other
        totals = concentration.entity_totals(records, "count")
        assert totals == {"SP": 40, "RJ": 10}
        assert concentration.top_share(records, "count", 0.5) == 0.8

    @given(
        st.lists(st.integers(1, 500), min_size=1, max_size=20),
        st.floats(0.05, 1.0),
    )
    @settings(max_examples=100)
    def test_matches_brute_force(self, totals, q):
        counts = {f"E{i}": c for i, c in enumerate(totals)}
        records = make_records(counts)
        got = concentration.top_share(records, "count", q)
        assert got == pytest.approx(brute_force_top_share(totals, q), rel=1e-12)


class TestLorenz:
    def test_equal_totals_is_diagonal(self):
        records = make_records({chr(65 + i): 4 for i in range(5)})
        summary = concentration.lorenz(records, "count")
        for p, share in summary.lorenz_points:
            assert share == pytest.approx(p, abs=1e-12)

    def test_toy_complement_of_top_share(self):
        records = make_records({"A": 80, "B": 5, "C": 5, "D": 5, "E": 5})
        summary = concentration.lorenz(records, "count")
        as_dict = dict(summary.lorenz_points)
        assert as_dict[0.8] == pytest.approx(0.2, rel=1e-12)

    def test_one_entity_holds_everything(self):
        records = make_records(volumes_by_entity={"A": "100", "B": "0", "C": "0"})
        summary = concentration.lorenz(records, "volume")
        for p, share in summary.lorenz_points:
            if p < 1.0:
                assert share == 0.0
        assert summary.lorenz_points[-1] == (1.0, 1.0)

    def test_endpoints_and_convexity(self):
        records = make_records({"A": 37, "B": 12, "C": 5, "D": 90, "E": 1, "F": 44})
        summary = concentration.lorenz(records, "count")
        pts = summary.lorenz_points
        assert pts[0] == (0.0, 0.0)
        assert pts[-1] == (1.0, 1.0)
        slopes = [
            (l1 - l0) / (p1 - p0)
            for (p0, l0), (p1, l1) in zip(pts[:-1], pts[1:])
        ]
        assert all(s1 >= s0 - 1e-12 for s0, s1 in zip(slopes[:-1], slopes[1:]))

    def test_gini_of_toy_set(self):
        # trapezoid-rule oracle on the known Lorenz points of {80,5,5,5,5}
        records = make_records({"A": 80, "B": 5, "C": 5, "D": 5, "E": 5})
        summary = concentration.lorenz(records, "count")
        assert summary.gini() == pytest.approx(0.6, rel=1e-12)

    def test_gini_zero_for_perfect_equality(self):
        records = make_records({chr(65 + i): 4 for i in range(5)})
        assert concentration.lorenz(records, "count").gini() == pytest.approx(0.0, abs=1e-12)

    def test_share_of_top_matches_top_share(self):
        records = make_records({"A": 80, "B": 5, "C": 5, "D": 5, "E": 5})
        summary = concentration.lorenz(records, "count")
        for q in (0.2, 0.4, 1.0):
            assert summary.share_of_top(q) == concentration.top_share(records, "count", q)

    @given(st.lists(st.integers(1, 500), min_size=1, max_size=20))
    @settings(max_examples=100)
    def test_matches_exhaustive_partial_sums(self, totals):
        counts = {f"E{i}": c for i, c in enumerate(totals)}
        summary = concentration.lorenz(make_records(counts), "count")
        ordered = sorted(totals)
        grand = sum(ordered)
        for k, (p, share) in enumerate(summary.lorenz_points):
            assert p == pytest.approx(k / len(ordered), rel=1e-12)
            assert share == pytest.approx(sum(ordered[:k]) / grand, rel=1e-12)


class TestCcdf:
    def test_survival_counts(self):
        points = concentration.ccdf([1, 2, 3, 4])
        as_dict = dict(zip(points.thresholds, points.survival))
        assert as_dict[3.0] == 0.5

    def test_all_equal_collapses_to_single_point(self):
        points = concentration.ccdf([Decimal("7.00")] * 5)
        assert points.thresholds == (7.0,)
        assert points.survival == (1.0,)

    def test_duplicates(self):
        points = concentration.ccdf([10, 10, 100])
        as_dict = dict(zip(points.thresholds, points.survival))
        assert as_dict[100.0] == pytest.approx(1 / 3, rel=1e-12)

    def test_monotone_and_starts_at_one(self):
        points = concentration.ccdf([5, 1, 9, 9, 2, 2, 7])
        assert points.survival[0] == 1.0
        assert all(b <= a for a, b in zip(points.survival[:-1], points.survival[1:]))
        assert list(points.thresholds) == sorted(points.thresholds)

    def test_zeros_excluded_and_reported(self):
        points = concentration.ccdf([0, 0, 5, 10])
        assert points.excluded_zero_count == 2
        assert points.survival[0] == 1.0

    def test_all_zero_rejected(self):
        with pytest.raises(EmptySelectionError):
            concentration.ccdf([0, 0])

    @given(st.lists(st.integers(1, 50), min_size=1, max_size=40))
    @settings(max_examples=100)
    def test_matches_brute_force_counting(self, values):
        points = concentration.ccdf(values)
        n = len(values)
        for x, s in zip(points.thresholds, points.survival):
            assert s == pytest.approx(sum(1 for v in values if v >= x) / n, rel=1e-12)


class TestDegenerate:
    def test_zero_total_volume(self):
        records = make_records(volumes_by_entity={"A": "0", "B": "0"})
        with pytest.raises(DegenerateSeriesError):
            concentration.top_share(records, "volume", 0.2)
