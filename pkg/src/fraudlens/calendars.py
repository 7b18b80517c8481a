"""Billing/due schedules, employee shifts, holidays, and time-of-day queries.

All lookups here are pure reads over immutable values; ranking factors and
layouts call into this module for date-distance and shift classification.
"""

from __future__ import annotations

import calendar as _cal
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import Mapping

from .events import ConfigError

STATUS_BLACKLISTED = "blacklisted"
STATUS_SUSPECT = "suspect"
STATUS_CLEARED = "cleared"
STATUSES = (STATUS_BLACKLISTED, STATUS_SUSPECT, STATUS_CLEARED)

OUTSIDE_HOURS = "outside_hours"
END_OF_SHIFT = "end_of_shift"
IN_SHIFT = "in_shift"

TARGET_BILLING = "billing"
TARGET_DUE = "due"

_WEEKDAY_KEYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")


@dataclass(frozen=True)
class ClientProfile:
    client_id: str
    billing_day: int | None = None
    due_day: int | None = None
    status: str = STATUS_CLEARED

    def __post_init__(self) -> None:
        for name, day in (("billing_day", self.billing_day), ("due_day", self.due_day)):
            if day is not None and not 1 <= day <= 31:
                raise ConfigError(f"{name} must be in 1..31, got {day}")
        if self.status not in STATUSES:
            raise ConfigError(f"unknown client status {self.status!r}")

    def day_for(self, target: str) -> int | None:
        if target == TARGET_BILLING:
            return self.billing_day
        if target == TARGET_DUE:
            return self.due_day
        raise ValueError(f"unknown schedule target {target!r}")


@dataclass(frozen=True)
class ShiftSchedule:
    """Per-weekday working interval; a missing weekday means the day is off.

    Overnight shifts (end <= start) are rejected at load time.
    """

    employee_id: str
    weekday_hours: Mapping[int, tuple[time, time]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for weekday, (start, end) in self.weekday_hours.items():
            if not 0 <= weekday <= 6:
                raise ConfigError(f"weekday index {weekday} out of range")
            if end <= start:
                raise ConfigError(
                    f"shift for {self.employee_id} on weekday {weekday} ends at or "
                    f"before it starts ({start}..{end}); overnight shifts unsupported"
                )

    def interval_on(self, day: date) -> tuple[time, time] | None:
        return self.weekday_hours.get(day.weekday())


@dataclass(frozen=True)
class HolidayCalendar:
    holidays: frozenset[date] = frozenset()
    weekend_days: frozenset[int] = frozenset((5, 6))  # Saturday, Sunday

    def is_nonworking(self, day: date) -> bool:
        return day.weekday() in self.weekend_days or day in self.holidays


def _clamped_day(year: int, month: int, day_of_month: int) -> int:
    # day 29-31 in a shorter month clamps to the month's last day
    return min(day_of_month, _cal.monthrange(year, month)[1])


def distance_to_billing(event_time: datetime, profile: ClientProfile, target: str = TARGET_BILLING) -> int:
    """Whole days from the event to the next scheduled billing/due date.

    An event on the scheduled day returns 0; later events count toward the
    following month's date (the schedule recurs monthly on a fixed
    day-of-month, clamped to short months).
    """
    scheduled = profile.day_for(target)
    if scheduled is None:
        raise ValueError(f"client {profile.client_id} has no {target} day configured")
    event_day = event_time.date()
    this_month = event_day.replace(day=_clamped_day(event_day.year, event_day.month, scheduled))
    if event_day <= this_month:
        return (this_month - event_day).days
    year, month = (event_day.year, event_day.month + 1) if event_day.month < 12 else (event_day.year + 1, 1)
    next_month = date(year, month, _clamped_day(year, month, scheduled))
    return (next_month - event_day).days


def classify_time_of_day(
    when: datetime,
    schedule: ShiftSchedule | None,
    holidays: HolidayCalendar,
    end_window_minutes: int = 120,
) -> str:
    """Classify an instant as outside_hours / end_of_shift / in_shift.

    Weekends and holidays are outside_hours regardless of the hour. An
    unknown schedule classifies as in_shift so that ranking can proceed when
    shift data is unavailable; the working-hours factor notes the gap.
    """
    day = when.date()
    if holidays.is_nonworking(day):
        return OUTSIDE_HOURS
    if schedule is None:
        return IN_SHIFT
    interval = schedule.interval_on(day)
    if interval is None:
        return OUTSIDE_HOURS  # scheduled day off
    start, end = interval
    moment = when.time()
    if not (start <= moment < end):
        return OUTSIDE_HOURS
    end_dt = datetime.combine(day, end)
    if datetime.combine(day, moment) >= end_dt - timedelta(minutes=end_window_minutes):
        return END_OF_SHIFT
    return IN_SHIFT


def _parse_hhmm(raw: str) -> time:
    try:
        hours, minutes = raw.strip().split(":")
        return time(int(hours), int(minutes))
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"bad time of day {raw!r}; expected HH:MM") from exc


def load_profiles(items: list[dict]) -> dict[str, ClientProfile]:
    """Load client profiles from the JSON configuration array."""
    profiles: dict[str, ClientProfile] = {}
    for obj in items:
        try:
            profile = ClientProfile(
                client_id=str(obj["client_id"]),
                billing_day=obj.get("billing_day"),
                due_day=obj.get("due_day"),
                status=obj.get("status", STATUS_CLEARED),
            )
        except KeyError as exc:
            raise ConfigError(f"client profile missing {exc.args[0]!r}: {obj!r}") from exc
        profiles[profile.client_id] = profile
    return profiles


def load_shifts(items: list[dict]) -> dict[str, ShiftSchedule]:
    """Load shift schedules; each entry maps weekday names to [start, end] or "off"."""
    schedules: dict[str, ShiftSchedule] = {}
    for obj in items:
        try:
            employee_id = str(obj["employee_id"])
            raw_shifts = obj["shifts"]
        except KeyError as exc:
            raise ConfigError(f"shift schedule missing {exc.args[0]!r}: {obj!r}") from exc
        hours: dict[int, tuple[time, time]] = {}
        for key, value in raw_shifts.items():
            key_lower = str(key).lower()
            if key_lower not in _WEEKDAY_KEYS:
                raise ConfigError(f"unknown weekday {key!r} in shifts for {employee_id}")
            if value in (None, "off", "OFF"):
                continue
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ConfigError(f"shift for {employee_id}/{key} must be [start, end] or \"off\"")
            hours[_WEEKDAY_KEYS.index(key_lower)] = (_parse_hhmm(value[0]), _parse_hhmm(value[1]))
        schedules[employee_id] = ShiftSchedule(employee_id, hours)
    return schedules


def load_holidays(obj: dict) -> HolidayCalendar:
    """Load the holiday set and weekend rule from the JSON configuration object."""
    days = frozenset(date.fromisoformat(d) for d in obj.get("dates", ()))
    weekend_names = obj.get("weekend", ["sat", "sun"])
    weekend: set[int] = set()
    for name in weekend_names:
        name_lower = str(name).lower()
        if name_lower not in _WEEKDAY_KEYS:
            raise ConfigError(f"unknown weekend day {name!r}")
        weekend.add(_WEEKDAY_KEYS.index(name_lower))
    return HolidayCalendar(holidays=days, weekend_days=frozenset(weekend))
