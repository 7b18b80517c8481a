"""Event model, log parsing/export, and daily deduplication.

An event is one audit record: who (employee) did what (action) to which
client account, when, and from which business system. Events are immutable
once parsed; everything downstream (ranking, layouts) consumes them
read-only.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence
from zoneinfo import ZoneInfo

CANONICAL_FIELDS = ("timestamp", "employee_id", "client_id", "action", "source_system")
MANDATORY_FIELDS = CANONICAL_FIELDS[:4]
DEFAULT_SOURCE = "default"

TS_FORMAT = "%Y-%m-%dT%H:%M"


class IngestError(RuntimeError):
    """Fatal ingestion problem: unreadable stream, bad schema mapping, write failure."""


class ConfigError(ValueError):
    """Invalid configuration value (format tag, schema, thresholds, ...)."""


def parse_timestamp(raw: str, tz: ZoneInfo | None = None) -> datetime:
    """Parse an ISO-8601 timestamp to a naive minute-precision datetime.

    Seconds are accepted and truncated. A timestamp carrying a UTC offset is
    converted into the dataset timezone (``tz``, default UTC) and then made
    naive; all timestamps in one data set live in a single timezone.
    """
    ts = datetime.fromisoformat(raw.strip())
    if ts.tzinfo is not None:
        ts = ts.astimezone(tz or ZoneInfo("UTC")).replace(tzinfo=None)
    return ts.replace(second=0, microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.strftime(TS_FORMAT)


@dataclass(frozen=True, slots=True)
class Event:
    """One audit record: (timestamp, employee, client, action) plus source system."""

    timestamp: datetime
    employee_id: str
    client_id: str
    action: str
    source_system: str = DEFAULT_SOURCE

    def __post_init__(self) -> None:
        if not self.employee_id or not self.client_id or not self.action:
            raise ValueError("employee_id, client_id and action must be non-empty")

    @property
    def date(self) -> date:
        return self.timestamp.date()

    @property
    def key(self) -> str:
        """Full identity key; two events are exact duplicates iff keys are equal."""
        return "|".join(
            (
                format_timestamp(self.timestamp),
                self.employee_id,
                self.client_id,
                self.action,
                self.source_system,
            )
        )

    @property
    def day_key(self) -> str:
        """Spiral-node identity: one node per (employee, client, calendar date)."""
        return "|".join((self.employee_id, self.client_id, self.date.isoformat()))

    def sort_key(self) -> tuple:
        return (self.timestamp, self.employee_id, self.action, self.source_system)

    def to_record(self) -> dict[str, str]:
        return {
            "timestamp": format_timestamp(self.timestamp),
            "employee_id": self.employee_id,
            "client_id": self.client_id,
            "action": self.action,
            "source_system": self.source_system,
        }


@dataclass(frozen=True)
class Window:
    """Closed time interval [start, end]."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ValueError(f"inverted window: end {self.end} before start {self.start}")

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts <= self.end

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse an ISO interval 'start/end' (also accepts '..' as separator)."""
        sep = "/" if "/" in text else ".."
        try:
            raw_start, raw_end = text.split(sep, 1)
            return cls(parse_timestamp(raw_start), parse_timestamp(raw_end))
        except ValueError as exc:
            raise ValueError(f"bad window {text!r}: {exc}") from exc

    def isoformat(self) -> str:
        return f"{format_timestamp(self.start)}/{format_timestamp(self.end)}"


@dataclass(frozen=True)
class EventSeries:
    """Time-ordered events related to one client (possibly many employees)."""

    client_id: str
    events: tuple[Event, ...]

    @classmethod
    def build(cls, client_id: str, events: Iterable[Event]) -> "EventSeries":
        ordered = tuple(sorted(events, key=Event.sort_key))
        for e in ordered:
            if e.client_id != client_id:
                raise ValueError(f"event for client {e.client_id!r} in series {client_id!r}")
        return cls(client_id, ordered)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def distinct_dates(self) -> list[date]:
        seen: dict[date, None] = {}
        for e in self.events:
            seen.setdefault(e.date, None)
        return list(seen)

    def employees(self) -> set[str]:
        return {e.employee_id for e in self.events}


@dataclass
class IngestReport:
    """Outcome of a parse or store batch. accepted + rejected == total records seen."""

    accepted: int = 0
    rejected: int = 0
    rejection_reasons: list[tuple[int, str]] = field(default_factory=list)
    time_range: tuple[datetime, datetime] | None = None
    duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "duplicates": self.duplicates,
            "rejection_reasons": [[line, reason] for line, reason in self.rejection_reasons],
            "time_range": [format_timestamp(self.time_range[0]), format_timestamp(self.time_range[1])]
            if self.time_range
            else None,
        }


def _open_text(source: str | Path | bytes | IO) -> IO[str]:
    """Paths open as UTF-8 text; bytes and file-likes are wrapped in memory."""
    if isinstance(source, (str, Path)):
        try:
            return open(source, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise IngestError(f"cannot read {source}: {exc}") from exc
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise IngestError(f"unreadable input source: {type(source).__name__}")


def parse_log(
    source: str | Path | bytes | IO,
    format: str = "csv",
    schema_map: dict[str, str] | None = None,
    *,
    delimiter: str = ",",
    tz: ZoneInfo | None = None,
) -> tuple[list[Event], IngestReport]:
    """Parse a raw audit log into events.

    ``schema_map`` maps canonical field names (timestamp, employee_id,
    client_id, action, source_system) to the column/field names used by the
    originating business system. Malformed records are counted and reported
    with their line numbers, never silently dropped.
    """
    mapping = dict(schema_map) if schema_map else {f: f for f in CANONICAL_FIELDS}
    for name in MANDATORY_FIELDS:
        if name not in mapping:
            raise ConfigError(f"schema_map is missing mandatory field {name!r}")

    if format == "csv":
        return _parse_csv(source, mapping, delimiter, tz)
    if format in ("json-lines", "jsonl"):
        return _parse_jsonl(source, mapping, tz)
    raise ConfigError(f"unknown log format {format!r}; expected 'csv' or 'json-lines'")


def _record_to_event(raw: dict[str, str | None], tz: ZoneInfo | None) -> Event:
    for name in MANDATORY_FIELDS:
        value = raw.get(name)
        if value is None or not str(value).strip():
            raise ValueError(f"missing value for {name}")
    ts = parse_timestamp(str(raw["timestamp"]), tz)
    source = str(raw.get("source_system") or "").strip() or DEFAULT_SOURCE
    return Event(
        timestamp=ts,
        employee_id=str(raw["employee_id"]).strip(),
        client_id=str(raw["client_id"]).strip(),
        action=str(raw["action"]).strip(),
        source_system=source,
    )


def _parse_csv(source, mapping, delimiter, tz) -> tuple[list[Event], IngestReport]:
    events: list[Event] = []
    report = IngestReport()
    with _open_text(source) as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        if reader.fieldnames is None:
            return [], report
        for canonical in MANDATORY_FIELDS:
            if mapping[canonical] not in reader.fieldnames:
                raise IngestError(
                    f"column {mapping[canonical]!r} (for {canonical}) not in CSV header"
                )
        for row in reader:
            line = reader.line_num
            raw = {c: row.get(col) for c, col in mapping.items()}
            try:
                events.append(_record_to_event(raw, tz))
                report.accepted += 1
            except (ValueError, TypeError) as exc:
                report.rejected += 1
                report.rejection_reasons.append((line, str(exc)))
    _finish_report(report, events)
    return events, report


def _parse_jsonl(source, mapping, tz) -> tuple[list[Event], IngestReport]:
    events: list[Event] = []
    report = IngestReport()
    with _open_text(source) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("line is not a JSON object")
                raw = {c: obj.get(col) for c, col in mapping.items()}
                events.append(_record_to_event(raw, tz))
                report.accepted += 1
            except (ValueError, TypeError) as exc:
                report.rejected += 1
                report.rejection_reasons.append((line_no, str(exc)))
    _finish_report(report, events)
    return events, report


def _finish_report(report: IngestReport, events: Sequence[Event]) -> None:
    if events:
        stamps = [e.timestamp for e in events]
        report.time_range = (min(stamps), max(stamps))


def export_log(
    events: Iterable[Event],
    destination: str | Path,
    format: str = "csv",
    *,
    delimiter: str = ",",
) -> int:
    """Write events to a log file; parse_log on the result reproduces them.

    The write is atomic: output goes to a temp file in the destination
    directory and is renamed into place, so a failure leaves no partial file.
    """
    if format not in ("csv", "json-lines", "jsonl"):
        raise ConfigError(f"unknown export format {format!r}")
    destination = Path(destination)
    count = 0
    tmp_fd, tmp_name = None, None
    try:
        tmp_fd, tmp_name = tempfile.mkstemp(
            prefix=destination.name + ".", dir=str(destination.parent)
        )
        with os.fdopen(tmp_fd, "w", encoding="utf-8", newline="") as fh:
            tmp_fd = None
            if format == "csv":
                writer = csv.DictWriter(fh, fieldnames=list(CANONICAL_FIELDS), delimiter=delimiter)
                writer.writeheader()
                for e in events:
                    writer.writerow(e.to_record())
                    count += 1
            else:
                for e in events:
                    fh.write(json.dumps(e.to_record(), sort_keys=True))
                    fh.write("\n")
                    count += 1
        os.replace(tmp_name, destination)
        tmp_name = None
    except OSError as exc:
        raise IngestError(f"export to {destination} failed: {exc}") from exc
    finally:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)
    return count


def dedupe_daily(series: EventSeries) -> EventSeries:
    """Collapse each (employee, calendar date) group to its earliest event.

    This is the spiral-view rule only: ranking factors must see every event,
    so never feed the result of this into factor evaluation.
    """
    kept: dict[tuple[str, date], Event] = {}
    for e in series.events:  # already sorted, first seen is earliest
        kept.setdefault((e.employee_id, e.date), e)
    return EventSeries.build(series.client_id, kept.values())
