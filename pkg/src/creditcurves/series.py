"""Operation records: CSV ingestion, yearly cumulative aggregation,
empirical derivatives and acceleration peaks.

CSV schema (header required, comma-separated, UTF-8):

    date,entity_id,parent_state,value,status

date ISO-8601 (YYYY-MM-DD); parent_state may be empty; value a nonnegative
decimal with '.' separator; status one of ``assented`` / ``rejected``.
Monetary values are accumulated as exact decimals and converted to binary
floating point only when a series is handed to numerical code.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import os
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import (
    DomainError,
    EmptySelectionError,
    InsufficientDataError,
    RowParseError,
)

CSV_HEADER = ("date", "entity_id", "parent_state", "value", "status")
STATUSES = ("assented", "rejected")
KINDS = ("count", "volume")
SCOPES = ("assented_only", "all_pleas")


@dataclass(frozen=True)
class OperationRecord:
    """One credit plea."""

    date: dt.date
    entity_id: str
    parent_state: str | None
    value: Decimal
    status: str

    def __post_init__(self):
        if not isinstance(self.date, dt.date):
            raise DomainError(f"date must be a calendar date, got {self.date!r}")
        if not self.entity_id:
            raise DomainError("entity_id must be non-empty")
        if not isinstance(self.value, Decimal) or not self.value.is_finite():
            raise DomainError(f"value must be a finite Decimal, got {self.value!r}")
        if self.value < 0:
            raise DomainError(f"value must be nonnegative, got {self.value}")
        if self.status not in STATUSES:
            raise DomainError(f"status must be one of {STATUSES}, got {self.status!r}")


@dataclass(frozen=True)
class RowIssue:
    line: int
    message: str


@dataclass
class ParseResult:
    records: list[OperationRecord]
    issues: list[RowIssue] = field(default_factory=list)
    rows_read: int = 0


def _parse_row(line_no: int, row: list[str]) -> OperationRecord:
    if len(row) != len(CSV_HEADER):
        raise RowParseError(line_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
    raw_date, entity, parent, raw_value, status = (f.strip() for f in row)
    try:
        date = dt.date.fromisoformat(raw_date)
    except ValueError:
        raise RowParseError(line_no, f"malformed date {raw_date!r}") from None
    if not entity:
        raise RowParseError(line_no, "empty entity_id")
    try:
        value = Decimal(raw_value)
    except InvalidOperation:
        raise RowParseError(line_no, f"malformed value {raw_value!r}") from None
    if not value.is_finite():
        raise RowParseError(line_no, f"non-finite value {raw_value!r}")
    if value < 0:
        raise RowParseError(line_no, f"negative value {raw_value!r}")
    if status not in STATUSES:
        raise RowParseError(line_no, f"unknown status {status!r}")
    return OperationRecord(date, entity, parent or None, value, status)


def parse_records(
    source: Union[str, os.PathLike, IO], on_error: str = "raise"
) -> ParseResult:
    """Read operation records from a CSV path, text stream or byte stream.

    ``on_error="raise"`` fails fast on the first bad row; ``"collect"``
    skips bad rows and reports them in ``ParseResult.issues``.  Both modes
    raise on a missing or wrong header and on invalid UTF-8.
    """
    if on_error not in ("raise", "collect"):
        raise DomainError("on_error must be 'raise' or 'collect'")
    if hasattr(source, "read"):
        if isinstance(source.read(0), bytes):
            source = io.TextIOWrapper(source, encoding="utf-8", newline="")
        return _parse_stream(source, on_error)
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _parse_stream(fh, on_error)


def _parse_stream(stream: IO[str], on_error: str) -> ParseResult:
    reader = csv.reader(stream)
    line_no = 1
    try:
        try:
            header = next(reader)
        except StopIteration:
            raise RowParseError(1, "missing header row") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise RowParseError(1, f"header must be {','.join(CSV_HEADER)}")
        result = ParseResult(records=[])
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            result.rows_read += 1
            try:
                result.records.append(_parse_row(line_no, row))
            except RowParseError as exc:
                if on_error == "raise":
                    raise
                result.issues.append(RowIssue(exc.line, exc.message))
        return result
    except UnicodeDecodeError:
        raise RowParseError(line_no, "invalid UTF-8") from None


def write_records_csv(records: Iterable[OperationRecord], target: Union[str, os.PathLike, IO[str]]) -> None:
    """Emit records in the same schema `parse_records` consumes."""
    if hasattr(target, "write"):
        _write_stream(records, target)
        return
    with open(target, "w", encoding="utf-8", newline="") as fh:
        _write_stream(records, fh)


def _write_stream(records: Iterable[OperationRecord], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [r.date.isoformat(), r.entity_id, r.parent_state or "", str(r.value), r.status]
        )


@dataclass(frozen=True)
class CumulativeSeries:
    """Yearly cumulative trajectory at day-of-year observation points.

    Counts are ints, volumes exact Decimals, synthetic curves floats;
    `values_array` converts to float64 for numerical work.
    """

    year: int
    kind: str
    scope: str
    times: tuple
    values: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        if self.scope not in SCOPES:
            raise DomainError(f"scope must be one of {SCOPES}")
        if len(self.times) != len(self.values):
            raise DomainError("times and values must have equal length")
        if len(self.times) == 0:
            raise EmptySelectionError("empty series")
        t = np.asarray(self.times, dtype=np.float64)
        if t[0] < 1.0 or t[-1] > 366.0:
            raise DomainError("times must lie within [1, 366]")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise DomainError("times must be strictly increasing")
        prev = None
        for v in self.values:
            if prev is not None and v < prev:
                raise DomainError("values must be nondecreasing")
            prev = v
        if self.values[0] < 0:
            raise DomainError("values must start nonnegative")

    def __len__(self) -> int:
        return len(self.times)

    def times_array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=np.float64)

    def values_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=np.float64)


@dataclass(frozen=True)
class DerivativeSeries:
    """Empirical growth rates (units of the parent series per day)."""

    times: tuple
    rates: tuple

    def __post_init__(self):
        if len(self.times) != len(self.rates):
            raise DomainError("times and rates must have equal length")
        if any(not np.isfinite(r) for r in self.rates):
            raise DomainError("rates must be finite")


def day_of_year(date: dt.date) -> int:
    return (date - dt.date(date.year, 1, 1)).days + 1


def aggregate(
    records: Sequence[OperationRecord], year: int, kind: str, scope: str
) -> CumulativeSeries:
    """Cumulative count or monetary volume of records in (year, scope).

    Events sharing a day collapse into a single observation point; the
    series is cumulative over distinct event days.
    """
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}")
    if scope not in SCOPES:
        raise DomainError(f"scope must be one of {SCOPES}")
    per_day: dict[int, Decimal | int] = {}
    for r in records:
        if r.date.year != year:
            continue
        if scope == "assented_only" and r.status != "assented":
            continue
        day = day_of_year(r.date)
        if kind == "count":
            per_day[day] = per_day.get(day, 0) + 1
        else:
            per_day[day] = per_day.get(day, Decimal(0)) + r.value
    if not per_day:
        raise EmptySelectionError(f"no records for year={year}, scope={scope}")
    days = sorted(per_day)
    values = []
    running = 0 if kind == "count" else Decimal(0)
    for d in days:
        running += per_day[d]
        values.append(running)
    return CumulativeSeries(
        year=year, kind=kind, scope=scope, times=tuple(days), values=tuple(values)
    )


def central_difference(series: CumulativeSeries) -> DerivativeSeries:
    """Empirical dN/dt: central differences inside, one-sided at the ends."""
    if len(series) < 3:
        raise InsufficientDataError("need >= 3 points for central differences")
    t = series.times_array()
    v = series.values_array()
    rates = np.empty_like(v)
    rates[1:-1] = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    rates[0] = (v[1] - v[0]) / (t[1] - t[0])
    rates[-1] = (v[-1] - v[-2]) / (t[-1] - t[-2])
    return DerivativeSeries(times=tuple(t), rates=tuple(rates))


def find_peak(deriv: DerivativeSeries) -> tuple[float, float]:
    """Time of the maximum rate; ties break to the earliest time."""
    if len(deriv.rates) == 0:
        raise InsufficientDataError("empty derivative series")
    rates = np.asarray(deriv.rates, dtype=np.float64)
    idx = int(np.argmax(rates))
    return float(deriv.times[idx]), float(rates[idx])
