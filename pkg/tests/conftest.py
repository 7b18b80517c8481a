"""Shared fixtures and random-data builders."""

from __future__ import annotations

import random
from datetime import datetime, time, timedelta

import pytest

from fraudlens import (
    AnalysisEngine,
    ClientProfile,
    EngineConfig,
    Event,
    EventStore,
    HolidayCalendar,
    ShiftSchedule,
)

ACTIONS = ("login", "view_account", "payment_entry", "update_contact", "refund", "note_added")
SOURCES = ("default", "crm", "billing")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(99)


def random_event(
    rng: random.Random,
    *,
    clients: int = 6,
    employees: int = 4,
    start: datetime = datetime(2014, 1, 1),
    span_days: int = 180,
) -> Event:
    stamp = start + timedelta(
        days=rng.randrange(span_days), hours=rng.randrange(24), minutes=rng.randrange(60)
    )
    return Event(
        timestamp=stamp,
        employee_id=f"e{rng.randrange(employees) + 1}",
        client_id=f"c{rng.randrange(clients) + 1}",
        action=rng.choice(ACTIONS),
        source_system=rng.choice(SOURCES),
    )


def random_shift(rng: random.Random, employee_id: str) -> ShiftSchedule:
    hours = {}
    for weekday in range(7):
        if rng.random() < 0.25:
            continue  # day off
        start_h = rng.randrange(6, 11)
        end_h = rng.randrange(start_h + 4, min(start_h + 12, 24))
        hours[weekday] = (time(start_h, 0), time(end_h, rng.choice((0, 30))))
    return ShiftSchedule(employee_id, hours)


def random_profile(rng: random.Random, client_id: str) -> ClientProfile:
    return ClientProfile(
        client_id,
        billing_day=rng.randrange(1, 32) if rng.random() < 0.8 else None,
        due_day=rng.randrange(1, 32) if rng.random() < 0.5 else None,
        status=rng.choice(("cleared", "cleared", "cleared", "suspect", "blacklisted")),
    )


def random_holidays(rng: random.Random, year: int = 2014) -> HolidayCalendar:
    dates = frozenset(
        datetime(year, rng.randrange(1, 13), rng.randrange(1, 29)).date() for _ in range(rng.randrange(0, 6))
    )
    return HolidayCalendar(holidays=dates)


def make_engine(events, config: EngineConfig | None = None, window=None) -> AnalysisEngine:
    store = EventStore()
    store.add_events(events)
    return AnalysisEngine(store, config or EngineConfig(), window)
