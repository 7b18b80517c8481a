"""Single-file sqlite persistence for events, client status, and audit log.

The events table carries a uniqueness constraint over all five event fields,
so re-ingesting the same log is idempotent: exact duplicates are dropped and
counted, near-duplicates (any field differs) are kept.
"""

from __future__ import annotations

import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from .calendars import STATUSES
from .events import TS_FORMAT, Event, EventSeries, Window

_SCHEMA = """
CREATE TABLE IF NOT EXISTS events (
    id INTEGER PRIMARY KEY,
    timestamp TEXT NOT NULL,
    employee_id TEXT NOT NULL,
    client_id TEXT NOT NULL,
    action TEXT NOT NULL,
    source_system TEXT NOT NULL DEFAULT 'default',
    UNIQUE (timestamp, employee_id, client_id, action, source_system)
);
CREATE INDEX IF NOT EXISTS idx_events_client_ts ON events (client_id, timestamp);
CREATE INDEX IF NOT EXISTS idx_events_employee_ts ON events (employee_id, timestamp);
CREATE INDEX IF NOT EXISTS idx_events_ts ON events (timestamp);
CREATE TABLE IF NOT EXISTS client_status (
    client_id TEXT PRIMARY KEY,
    status TEXT NOT NULL,
    updated_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS audit_log (
    id INTEGER PRIMARY KEY,
    at TEXT NOT NULL,
    actor TEXT NOT NULL,
    action TEXT NOT NULL,
    detail TEXT NOT NULL DEFAULT ''
);
"""


def _row_to_event(row: Sequence[str]) -> Event:
    return Event(
        timestamp=datetime.strptime(row[0], TS_FORMAT),
        employee_id=row[1],
        client_id=row[2],
        action=row[3],
        source_system=row[4],
    )


class EventStore:
    """Append-only event store with status markings and an audit trail."""

    def __init__(self, path: str | Path = ":memory:") -> None:
        self.path = str(path)
        # sqlite3 compiles in serialized threading mode; the service reads
        # from worker threads while mutations stay serialized upstream
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.executescript(_SCHEMA)
        self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "EventStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- events ------------------------------------------------------------

    def add_events(self, events: Iterable[Event]) -> tuple[int, int]:
        """Insert events in one transaction; returns (inserted, duplicates)."""
        inserted = duplicates = 0
        with self._conn:
            for event in events:
                cursor = self._conn.execute(
                    "INSERT OR IGNORE INTO events"
                    " (timestamp, employee_id, client_id, action, source_system)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (
                        event.timestamp.strftime(TS_FORMAT),
                        event.employee_id,
                        event.client_id,
                        event.action,
                        event.source_system,
                    ),
                )
                if cursor.rowcount == 1:
                    inserted += 1
                else:
                    duplicates += 1
        return inserted, duplicates

    _SELECT = "SELECT timestamp, employee_id, client_id, action, source_system FROM events"
    _ORDER = " ORDER BY timestamp, employee_id, action, source_system"

    def _window_clause(self, window: Window | None) -> tuple[str, list[str]]:
        if window is None:
            return "", []
        return (
            " WHERE timestamp >= ? AND timestamp <= ?",
            [window.start.strftime(TS_FORMAT), window.end.strftime(TS_FORMAT)],
        )

    def all_events(self, window: Window | None = None) -> list[Event]:
        clause, params = self._window_clause(window)
        rows = self._conn.execute(self._SELECT + clause + self._ORDER, params)
        return [_row_to_event(row) for row in rows]

    def events_for_client(self, client_id: str, window: Window | None = None) -> EventSeries:
        clause, params = self._window_clause(window)
        clause = (clause + " AND client_id = ?") if clause else " WHERE client_id = ?"
        rows = self._conn.execute(self._SELECT + clause + self._ORDER, params + [client_id])
        return EventSeries.build(client_id, [_row_to_event(row) for row in rows])

    def events_for_employee(self, employee_id: str, window: Window | None = None) -> list[Event]:
        clause, params = self._window_clause(window)
        clause = (clause + " AND employee_id = ?") if clause else " WHERE employee_id = ?"
        rows = self._conn.execute(self._SELECT + clause + self._ORDER, params + [employee_id])
        return [_row_to_event(row) for row in rows]

    def client_ids(self, window: Window | None = None) -> list[str]:
        clause, params = self._window_clause(window)
        rows = self._conn.execute(
            "SELECT DISTINCT client_id FROM events" + clause + " ORDER BY client_id", params
        )
        return [row[0] for row in rows]

    def employee_ids(self, window: Window | None = None) -> list[str]:
        clause, params = self._window_clause(window)
        rows = self._conn.execute(
            "SELECT DISTINCT employee_id FROM events" + clause + " ORDER BY employee_id", params
        )
        return [row[0] for row in rows]

    def event_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM events").fetchone()[0]

    def has_client(self, client_id: str) -> bool:
        row = self._conn.execute(
            "SELECT 1 FROM events WHERE client_id = ? LIMIT 1", (client_id,)
        ).fetchone()
        return row is not None

    def time_range(self) -> tuple[datetime, datetime] | None:
        row = self._conn.execute("SELECT MIN(timestamp), MAX(timestamp) FROM events").fetchone()
        if row[0] is None:
            return None
        return datetime.strptime(row[0], TS_FORMAT), datetime.strptime(row[1], TS_FORMAT)

    # -- status and audit ----------------------------------------------------

    def set_status(self, client_id: str, status: str, actor: str, at: datetime) -> None:
        if status not in STATUSES:
            raise ValueError(f"unknown client status {status!r}")
        stamp = at.strftime(TS_FORMAT)
        with self._conn:
            self._conn.execute(
                "INSERT INTO client_status (client_id, status, updated_at) VALUES (?, ?, ?)"
                " ON CONFLICT (client_id) DO UPDATE SET status = ?, updated_at = ?",
                (client_id, status, stamp, status, stamp),
            )
            self._conn.execute(
                "INSERT INTO audit_log (at, actor, action, detail) VALUES (?, ?, ?, ?)",
                (stamp, actor, "set_status", f"{client_id} -> {status}"),
            )

    def status_overrides(self) -> dict[str, str]:
        rows = self._conn.execute("SELECT client_id, status FROM client_status")
        return {row[0]: row[1] for row in rows}

    def append_audit(self, actor: str, action: str, detail: str, at: datetime) -> None:
        with self._conn:
            self._conn.execute(
                "INSERT INTO audit_log (at, actor, action, detail) VALUES (?, ?, ?, ?)",
                (at.strftime(TS_FORMAT), actor, action, detail),
            )

    def audit_entries(self) -> list[dict]:
        rows = self._conn.execute(
            "SELECT at, actor, action, detail FROM audit_log ORDER BY id"
        )
        return [
            {"at": row[0], "actor": row[1], "action": row[2], "detail": row[3]}
            for row in rows
        ]
