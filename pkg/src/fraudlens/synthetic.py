"""Deterministic synthetic data set for exercising the full pipeline.

Mirrors a six-month audit extract: 7,200 clients and 14 employees producing
about 35,000 events, plus a small set of injected clients whose activity is
the classic pattern worth catching: one dedicated employee acting every
month within three days before the client's billing date.

Background events stay on business days inside shift hours with benign
actions, which caps a background client's score at the injected clients'
score; ties then resolve by client id, and the injected ids sort first. The
generator redraws exact duplicates so the event count is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date, datetime, timedelta

from .config import EngineConfig, default_factors
from .calendars import ClientProfile, HolidayCalendar, ShiftSchedule, load_shifts
from .events import Event
from .ranking import ActionRules

BENIGN_ACTIONS = ("login", "view_account", "update_contact", "payment_entry", "note_added")
FORBIDDEN_ACTION = "void_transaction"
SUSPICIOUS_ACTION = "manual_discount"
INJECTED_ACTION = "payment_entry"


@dataclass(frozen=True)
class SyntheticDataset:
    events: tuple[Event, ...]
    config: EngineConfig
    injected_ids: tuple[str, ...]
    seed: int


def _client_id(n: int) -> str:
    return f"c{n:04d}"


def _business_days(start: date, end: date, holidays: HolidayCalendar) -> list[date]:
    days = []
    day = start
    while day <= end:
        if not holidays.is_nonworking(day):
            days.append(day)
        day += timedelta(days=1)
    return days


def generate_case_study(
    seed: int = 2014,
    *,
    n_clients: int = 7200,
    n_employees: int = 14,
    n_events: int = 35000,
    n_injected: int = 20,
    year: int = 2014,
    first_month: int = 1,
    n_months: int = 6,
) -> SyntheticDataset:
    """Build the synthetic audit extract with injected monthly offenders."""
    if n_injected * n_months > n_events:
        raise ValueError("event budget too small for the injected pattern")
    rng = random.Random(seed)
    employees = [f"e{n:02d}" for n in range(1, n_employees + 1)]

    shifts = load_shifts(
        [
            {
                "employee_id": employee,
                "shifts": {
                    name: ["08:00", "18:00"] for name in ("mon", "tue", "wed", "thu", "fri")
                },
            }
            for employee in employees
        ]
    )
    holidays = HolidayCalendar()

    last_month = first_month + n_months - 1
    start = date(year, first_month, 1)
    end = date(year, last_month + 1, 1) - timedelta(days=1) if last_month < 12 else date(year, 12, 31)
    workdays = _business_days(start, end, holidays)

    profiles: dict[str, ClientProfile] = {}
    events: list[Event] = []
    seen: set[str] = set()

    def push(event: Event) -> bool:
        if event.key in seen:
            return False
        seen.add(event.key)
        events.append(event)
        return True

    injected_ids = tuple(_client_id(i) for i in range(1, n_injected + 1))
    for client_id in injected_ids:
        billing_day = rng.randint(5, 28)
        offset = rng.randint(1, 3)
        employee = employees[rng.randrange(n_employees)]
        profiles[client_id] = ClientProfile(client_id, billing_day=billing_day, due_day=min(billing_day + 10, 28))
        for month in range(first_month, last_month + 1):
            stamp = datetime(year, month, billing_day - offset, 10, rng.randint(0, 59))
            push(Event(stamp, employee, client_id, INJECTED_ACTION))

    background_ids = [_client_id(i) for i in range(n_injected + 1, n_clients + 1)]
    for client_id in background_ids:
        profiles[client_id] = ClientProfile(
            client_id, billing_day=rng.randint(1, 28), due_day=rng.randint(1, 28)
        )

    remaining = n_events - len(events)
    if remaining < len(background_ids):
        raise ValueError("event budget too small for one event per background client")
    counts = {client_id: 1 for client_id in background_ids}
    for _ in range(remaining - len(background_ids)):
        counts[background_ids[rng.randrange(len(background_ids))]] += 1

    for client_id in background_ids:
        for _ in range(counts[client_id]):
            while True:
                day = workdays[rng.randrange(len(workdays))]
                stamp = datetime(day.year, day.month, day.day, rng.randint(8, 15), rng.randint(0, 59))
                employee = employees[rng.randrange(n_employees)]
                action = BENIGN_ACTIONS[rng.randrange(len(BENIGN_ACTIONS))]
                if push(Event(stamp, employee, client_id, action)):
                    break

    config = EngineConfig(
        factors=default_factors(),
        action_rules=ActionRules(
            forbidden={FORBIDDEN_ACTION: frozenset()},
            suspicious=frozenset({SUSPICIOUS_ACTION}),
        ),
        profiles=profiles,
        shifts=shifts,
        holidays=holidays,
    )
    return SyntheticDataset(tuple(events), config, injected_ids, seed)
