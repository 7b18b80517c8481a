from datetime import datetime

import pytest

from fraudlens import EventStore, Window
from fraudlens.events import Event

from conftest import random_event


def ev(ts, employee="e1", client="c1", action="login", source="default"):
    return Event(ts, employee, client, action, source)


def test_add_and_read_back_sorted(rng):
    events = [random_event(rng) for _ in range(40)]
    with EventStore() as store:
        inserted, duplicates = store.add_events(events)
        assert inserted == len({e.key for e in events})
        assert inserted + duplicates == len(events)
        loaded = store.all_events()
        assert len(loaded) == inserted
        assert loaded == sorted(loaded, key=lambda e: (e.timestamp, e.employee_id, e.action, e.source_system))
        assert {e.key for e in loaded} == {e.key for e in events}


def test_reingest_is_idempotent(rng):
    events = [random_event(rng) for _ in range(25)]
    store = EventStore()
    first, _ = store.add_events(events)
    second, dupes = store.add_events(events)
    assert second == 0 and dupes == len(events)
    assert store.event_count() == first


def test_near_duplicates_are_kept():
    base = ev(datetime(2014, 3, 10, 9, 0))
    variants = [
        base,
        ev(datetime(2014, 3, 10, 9, 1)),
        ev(datetime(2014, 3, 10, 9, 0), employee="e2"),
        ev(datetime(2014, 3, 10, 9, 0), action="refund"),
        ev(datetime(2014, 3, 10, 9, 0), source="crm"),
    ]
    store = EventStore()
    inserted, duplicates = store.add_events(variants + [base])
    assert inserted == 5 and duplicates == 1


def test_window_bounds_are_inclusive():
    store = EventStore()
    store.add_events(
        [
            ev(datetime(2014, 3, 1, 0, 0)),
            ev(datetime(2014, 3, 15, 12, 0)),
            ev(datetime(2014, 3, 31, 23, 59)),
            ev(datetime(2014, 4, 1, 0, 0)),
        ]
    )
    window = Window(datetime(2014, 3, 1), datetime(2014, 3, 31, 23, 59))
    assert len(store.all_events(window)) == 3


def test_per_client_and_employee_queries(rng):
    events = [random_event(rng) for _ in range(60)]
    store = EventStore()
    store.add_events(events)
    stored = store.all_events()
    for client_id in store.client_ids():
        series = store.events_for_client(client_id)
        assert series.client_id == client_id
        assert {e.key for e in series} == {e.key for e in stored if e.client_id == client_id}
    for employee_id in store.employee_ids():
        rows = store.events_for_employee(employee_id)
        assert all(e.employee_id == employee_id for e in rows)
        assert len(rows) == sum(1 for e in stored if e.employee_id == employee_id)


def test_client_query_respects_window():
    store = EventStore()
    store.add_events([ev(datetime(2014, 3, 10, 9, 0)), ev(datetime(2014, 5, 10, 9, 0))])
    window = Window(datetime(2014, 3, 1), datetime(2014, 3, 31, 23, 59))
    assert len(store.events_for_client("c1", window)) == 1
    assert len(store.events_for_client("c1")) == 2


def test_has_client_and_time_range():
    store = EventStore()
    assert store.time_range() is None
    assert not store.has_client("c1")
    store.add_events([ev(datetime(2014, 3, 10, 9, 0)), ev(datetime(2014, 4, 2, 18, 30))])
    assert store.has_client("c1") and not store.has_client("zz")
    assert store.time_range() == (datetime(2014, 3, 10, 9, 0), datetime(2014, 4, 2, 18, 30))


def test_status_upsert_and_audit_trail():
    store = EventStore()
    store.set_status("c1", "suspect", "auditor1", datetime(2014, 6, 1, 10, 0))
    store.set_status("c1", "blacklisted", "auditor2", datetime(2014, 6, 2, 10, 0))
    assert store.status_overrides() == {"c1": "blacklisted"}
    entries = store.audit_entries()
    assert [e["action"] for e in entries] == ["set_status", "set_status"]
    assert entries[1]["detail"] == "c1 -> blacklisted"
    assert entries[1]["actor"] == "auditor2"


def test_status_rejects_unknown_value():
    store = EventStore()
    with pytest.raises(ValueError):
        store.set_status("c1", "naughty", "a", datetime(2014, 6, 1, 0, 0))
    assert store.status_overrides() == {}


def test_append_audit():
    store = EventStore()
    store.append_audit("svc", "ingest", "42 events", datetime(2014, 6, 1, 9, 30))
    entries = store.audit_entries()
    assert entries == [{"at": "2014-06-01T09:30", "actor": "svc", "action": "ingest", "detail": "42 events"}]


def test_file_backed_store_persists(tmp_path):
    path = tmp_path / "events.db"
    store = EventStore(path)
    store.add_events([ev(datetime(2014, 3, 10, 9, 0))])
    store.set_status("c1", "suspect", "a", datetime(2014, 6, 1, 0, 0))
    store.close()
    reopened = EventStore(path)
    assert reopened.event_count() == 1
    assert reopened.status_overrides() == {"c1": "suspect"}
    reopened.close()
