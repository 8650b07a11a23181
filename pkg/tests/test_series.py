"""Record parsing, aggregation, differencing and peak detection."""

import datetime as dt
import io
import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditcurves import models, series, synth
from creditcurves.errors import (
    DomainError,
    EmptySelectionError,
    InsufficientDataError,
    RowParseError,
)

HEADER = "date,entity_id,parent_state,value,status\n"


def rec(day, value="1.00", status="assented", year=2014, entity="SP", parent=None):
    return series.OperationRecord(
        date=dt.date(year, 1, 1) + dt.timedelta(days=day - 1),
        entity_id=entity,
        parent_state=parent,
        value=Decimal(value),
        status=status,
    )


class TestParse:
    def test_single_row(self):
        text = HEADER + "2014-03-05,SP,,1500000.00,assented\n"
        result = series.parse_records(io.StringIO(text))
        assert result.rows_read == 1
        r = result.records[0]
        assert r.date == dt.date(2014, 3, 5)
        assert r.entity_id == "SP"
        assert r.parent_state is None
        assert r.value == Decimal("1500000.00")
        assert r.status == "assented"

    def test_negative_value_reports_line(self):
        text = HEADER + "2014-03-05,SP,,10,assented\n2014-03-06,RJ,,-5,assented\n"
        with pytest.raises(RowParseError) as err:
            series.parse_records(io.StringIO(text))
        assert err.value.line == 3
        assert "negative" in err.value.message

    def test_header_only_gives_empty_list(self):
        result = series.parse_records(io.StringIO(HEADER))
        assert result.records == []
        assert result.rows_read == 0

    def test_malformed_date_and_status(self):
        bad_date = HEADER + "05/03/2014,SP,,10,assented\n"
        with pytest.raises(RowParseError):
            series.parse_records(io.StringIO(bad_date))
        bad_status = HEADER + "2014-03-05,SP,,10,maybe\n"
        with pytest.raises(RowParseError):
            series.parse_records(io.StringIO(bad_status))

    def test_missing_header_rejected(self):
        with pytest.raises(RowParseError):
            series.parse_records(io.StringIO("2014-03-05,SP,,10,assented\n"))

    def test_collect_mode_skips_and_reports(self):
        text = (
            HEADER
            + "2014-03-05,SP,,10,assented\n"
            + "not-a-date,RJ,,10,assented\n"
            + "2014-03-07,MG,,-1,assented\n"
            + "2014-03-08,BA,,2.50,rejected\n"
        )
        result = series.parse_records(io.StringIO(text), on_error="collect")
        assert len(result.records) == 2
        assert result.rows_read == 4
        assert [i.line for i in result.issues] == [3, 4]

    def test_round_trip_preserves_records(self):
        records = [
            rec(10, "1500000.00"),
            rec(11, "0.01", status="rejected", entity="M123", parent="SP"),
        ]
        buf = io.StringIO()
        series.write_records_csv(records, buf)
        back = series.parse_records(io.StringIO(buf.getvalue()))
        assert back.records == records

    def test_byte_stream_accepted(self):
        text = HEADER + "2014-03-05,SP,,1500000.00,assented\n"
        result = series.parse_records(io.BytesIO(text.encode("utf-8")))
        assert len(result.records) == 1

    def test_invalid_utf8_reports_line(self):
        raw = (HEADER + "2014-03-05,SP,,10,assented\n").encode("utf-8") + b"\xff\xfe,bad\n"
        with pytest.raises(RowParseError) as err:
            series.parse_records(io.BytesIO(raw))
        assert "UTF-8" in err.value.message


class TestAggregate:
    def test_count_example(self):
        records = [rec(10), rec(10), rec(40)]
        s = series.aggregate(records, 2014, "count", "all_pleas")
        assert s.times == (10, 40)
        assert s.values == (2, 3)

    def test_volume_example(self):
        records = [rec(10, "5"), rec(10, "7"), rec(40, "100")]
        s = series.aggregate(records, 2014, "volume", "all_pleas")
        assert s.times == (10, 40)
        assert s.values == (Decimal(12), Decimal(112))

    def test_all_rejected_with_assented_scope_is_empty(self):
        records = [rec(10, status="rejected"), rec(20, status="rejected")]
        with pytest.raises(EmptySelectionError):
            series.aggregate(records, 2014, "count", "assented_only")

    def test_year_filter(self):
        records = [rec(10, year=2013), rec(20, year=2014)]
        s = series.aggregate(records, 2014, "count", "all_pleas")
        assert s.times == (20,)

    def test_volume_total_is_exact_decimal_sum(self):
        values = ["0.10", "0.20", "0.30", "1e2", "123456789.01"]
        records = [rec(d + 1, v) for d, v in enumerate(values)]
        s = series.aggregate(records, 2014, "volume", "all_pleas")
        assert s.values[-1] == sum(Decimal(v) for v in values)

    @given(
        st.lists(
            st.tuples(
                st.integers(1, 365),
                st.decimals(min_value=0, max_value=10**9, places=2, allow_nan=False),
                st.booleans(),
            ),
            min_size=1,
            max_size=60,
        )
    )
    @settings(max_examples=80)
    def test_output_is_always_valid_series(self, rows):
        records = [
            rec(day, str(value), "assented" if ok else "rejected")
            for day, value, ok in rows
        ]
        s = series.aggregate(records, 2014, "count", "all_pleas")
        t = s.times_array()
        assert np.all(np.diff(t) > 0)
        assert s.values[-1] == len(records)
        v = s.values_array()
        assert np.all(np.diff(v) >= 0)


class TestCumulativeSeriesInvariants:
    def test_duplicate_times_rejected(self):
        with pytest.raises(DomainError):
            series.CumulativeSeries(2014, "count", "all_pleas", (1, 1, 2), (1, 2, 3))

    def test_decreasing_values_rejected(self):
        with pytest.raises(DomainError):
            series.CumulativeSeries(2014, "count", "all_pleas", (1, 2, 3), (3, 2, 1))

    def test_times_outside_year_rejected(self):
        with pytest.raises(DomainError):
            series.CumulativeSeries(2014, "count", "all_pleas", (0, 1), (1, 2))
        with pytest.raises(DomainError):
            series.CumulativeSeries(2014, "count", "all_pleas", (1, 367), (1, 2))


class TestCentralDifference:
    def test_interior_arithmetic(self):
        s = series.CumulativeSeries(2014, "count", "all_pleas", (1, 2, 3), (1, 4, 9))
        d = series.central_difference(s)
        assert d.rates[1] == pytest.approx(4.0, rel=1e-15)

    def test_linear_series_has_constant_rate(self):
        times = tuple(range(1, 21))
        s = series.CumulativeSeries(
            2014, "count", "all_pleas", times, tuple(2 * t for t in times)
        )
        d = series.central_difference(s)
        assert set(d.rates) == {2.0}

    def test_two_points_insufficient(self):
        s = series.CumulativeSeries(2014, "count", "all_pleas", (1, 2), (1, 2))
        with pytest.raises(InsufficientDataError):
            series.central_difference(s)

    def test_rates_match_ode_away_from_endpoints(self):
        # consistency oracle: the empirical derivative of a sampled curve
        # approaches the model's growth rate at the same state
        p = models.GompertzStrict(100.0, 0.05)
        s = synth.sample_curve(p, models.TimeGrid.daily(365), 0.0, 0)
        d = series.central_difference(s)
        v = s.values_array()
        for i in range(3, len(v) - 3):
            want = models.ode_rhs(p, float(v[i]))
            assert d.rates[i] == pytest.approx(want, rel=0.02)


class TestFindPeak:
    def test_argmax(self):
        d = series.DerivativeSeries(times=(10.0, 100.0, 300.0), rates=(1.0, 5.0, 2.0))
        assert series.find_peak(d) == (100.0, 5.0)

    def test_tie_breaks_to_earliest(self):
        d = series.DerivativeSeries(times=(10.0, 100.0, 300.0), rates=(2.0, 2.0, 2.0))
        assert series.find_peak(d) == (10.0, 2.0)

    def test_peak_near_analytic_inflection(self):
        m, w = 100.0, 0.05
        s = synth.sample_curve(models.GompertzStrict(m, w), models.TimeGrid.daily(365), 0.0, 0)
        t_peak, _ = series.find_peak(series.central_difference(s))
        t_star = 1.0 + math.log(math.log(m)) / w
        assert abs(t_peak - t_star) <= 1.0

    def test_peak_location_converges_with_sampling_density(self):
        m, w = 400.0, 0.03
        p = models.GompertzStrict(m, w)
        t_star = 1.0 + math.log(math.log(m)) / w
        errors = []
        for step in (14.0, 7.0, 1.0, 0.25):
            grid = models.TimeGrid(np.arange(1.0, 366.0, step))
            s = synth.sample_curve(p, grid, 0.0, 0)
            t_peak, _ = series.find_peak(series.central_difference(s))
            errors.append(abs(t_peak - t_star))
            assert errors[-1] <= step  # argmax lands within one grid cell
        assert errors[-1] <= errors[0]
        assert errors[-1] <= 0.25

    def test_empty_input(self):
        d = series.DerivativeSeries(times=(), rates=())
        with pytest.raises(InsufficientDataError):
            series.find_peak(d)
