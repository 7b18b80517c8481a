from datetime import date, datetime, time

import pytest

from fraudlens import ClientProfile, HolidayCalendar, ShiftSchedule, classify_time_of_day, distance_to_billing
from fraudlens.calendars import load_holidays, load_profiles, load_shifts
from fraudlens.events import ConfigError

from oracles import oracle_billing_distance


def test_profile_day_bounds():
    with pytest.raises(ConfigError):
        ClientProfile("c1", billing_day=0)
    with pytest.raises(ConfigError):
        ClientProfile("c1", due_day=32)
    with pytest.raises(ConfigError):
        ClientProfile("c1", status="pending")


def test_distance_on_the_day_is_zero():
    p = ClientProfile("c1", billing_day=15)
    assert distance_to_billing(datetime(2014, 3, 15, 10, 0), p) == 0


def test_distance_before_and_after_billing_day():
    p = ClientProfile("c1", billing_day=15)
    assert distance_to_billing(datetime(2014, 3, 12, 10, 0), p) == 3
    # past the 15th: counts toward April's billing date
    assert distance_to_billing(datetime(2014, 3, 16, 10, 0), p) == 30


def test_distance_clamps_short_months():
    p = ClientProfile("c1", billing_day=31)
    # February 2014 has 28 days, so billing falls on the 28th
    assert distance_to_billing(datetime(2014, 2, 25, 0, 0), p) == 3
    assert distance_to_billing(datetime(2014, 2, 28, 0, 0), p) == 0


def test_distance_crosses_year_boundary():
    p = ClientProfile("c1", billing_day=5)
    assert distance_to_billing(datetime(2014, 12, 30, 0, 0), p) == 6


def test_distance_due_target():
    p = ClientProfile("c1", billing_day=10, due_day=20)
    assert distance_to_billing(datetime(2014, 3, 18, 0, 0), p, "due") == 2
    with pytest.raises(ValueError):
        distance_to_billing(datetime(2014, 3, 18, 0, 0), ClientProfile("c2"), "billing")


def test_distance_matches_day_walk_oracle(rng):
    for _ in range(300):
        billing_day = rng.randrange(1, 32)
        stamp = datetime(2014, rng.randrange(1, 13), rng.randrange(1, 29), rng.randrange(24), 0)
        profile = ClientProfile("c1", billing_day=billing_day)
        assert distance_to_billing(stamp, profile) == oracle_billing_distance(stamp, billing_day)


WEEKDAY_SHIFT = ShiftSchedule("e1", {i: (time(8, 0), time(18, 0)) for i in range(5)})
CAL = HolidayCalendar(holidays=frozenset({date(2014, 5, 1)}))


def test_classify_weekend_trumps_shift():
    # 2014-03-08 is a Saturday
    assert classify_time_of_day(datetime(2014, 3, 8, 10, 0), WEEKDAY_SHIFT, CAL) == "outside_hours"


def test_classify_holiday_trumps_shift():
    assert classify_time_of_day(datetime(2014, 5, 1, 10, 0), WEEKDAY_SHIFT, CAL) == "outside_hours"


def test_classify_without_schedule_defaults_in_shift():
    assert classify_time_of_day(datetime(2014, 3, 10, 3, 0), None, CAL) == "in_shift"


def test_classify_day_off_is_outside():
    weekdays_only = ShiftSchedule("e1", {0: (time(9, 0), time(17, 0))})
    assert classify_time_of_day(datetime(2014, 3, 11, 10, 0), weekdays_only, CAL) == "outside_hours"


def test_classify_interval_boundaries():
    # Monday 2014-03-10, shift 08:00-18:00 with a 2h end window
    monday = datetime(2014, 3, 10, 0, 0)
    cases = {
        time(7, 59): "outside_hours",
        time(8, 0): "in_shift",
        time(15, 59): "in_shift",
        time(16, 0): "end_of_shift",
        time(17, 59): "end_of_shift",
        time(18, 0): "outside_hours",
    }
    for moment, expected in cases.items():
        stamp = monday.replace(hour=moment.hour, minute=moment.minute)
        assert classify_time_of_day(stamp, WEEKDAY_SHIFT, CAL) == expected, moment


def test_classify_custom_end_window():
    stamp = datetime(2014, 3, 10, 17, 45)
    assert classify_time_of_day(stamp, WEEKDAY_SHIFT, CAL, end_window_minutes=15) == "end_of_shift"
    assert classify_time_of_day(stamp.replace(minute=44), WEEKDAY_SHIFT, CAL, 15) == "in_shift"
    assert classify_time_of_day(stamp.replace(minute=29), WEEKDAY_SHIFT, CAL, 31) == "end_of_shift"
    assert classify_time_of_day(stamp.replace(hour=12, minute=0), WEEKDAY_SHIFT, CAL, 15) == "in_shift"


def test_overnight_shift_rejected():
    with pytest.raises(ConfigError):
        ShiftSchedule("e1", {0: (time(22, 0), time(6, 0))})


def test_load_profiles_and_shifts_and_holidays():
    profiles = load_profiles([{"client_id": "c1", "billing_day": 12, "status": "suspect"}])
    assert profiles["c1"].billing_day == 12 and profiles["c1"].status == "suspect"

    shifts = load_shifts(
        [{"employee_id": "e1", "shifts": {"mon": ["08:00", "16:30"], "sat": "off"}}]
    )
    assert shifts["e1"].weekday_hours == {0: (time(8, 0), time(16, 30))}

    cal = load_holidays({"dates": ["2014-05-01"], "weekend": ["fri", "sat"]})
    assert cal.is_nonworking(date(2014, 5, 1))
    assert cal.is_nonworking(date(2014, 3, 7))  # a Friday
    assert not cal.is_nonworking(date(2014, 3, 9))  # a Sunday


def test_load_shifts_rejects_bad_entries():
    with pytest.raises(ConfigError):
        load_shifts([{"employee_id": "e1", "shifts": {"noday": ["08:00", "16:00"]}}])
    with pytest.raises(ConfigError):
        load_shifts([{"employee_id": "e1", "shifts": {"mon": ["8am", "4pm"]}}])
    with pytest.raises(ConfigError):
        load_shifts([{"employee_id": "e1", "shifts": {"mon": ["08:00"]}}])
