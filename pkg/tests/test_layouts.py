import math
from datetime import date, datetime, time, timedelta
from fractions import Fraction

import pytest

from fraudlens import (
    ClientProfile,
    EventSeries,
    HolidayCalendar,
    SectorRegion,
    ShiftSchedule,
    Window,
    billing_window_region,
    layered_layout,
    radial_cluster_regions,
    rank_all,
    spiral_layout,
    stacked_bar,
    timeline_layout,
)
from fraudlens.config import default_factors
from fraudlens.events import Event
from fraudlens.layouts import (
    DEFAULT_DR,
    DEFAULT_R0,
    color_for,
    day_angle,
    shape_for,
)

from conftest import random_event, random_profile

TWO_PI = 2.0 * math.pi


def ev(ts, employee="e1", client="c1", action="login", source="default"):
    return Event(ts, employee, client, action, source)


def series(events, client_id="c1"):
    return EventSeries.build(client_id, events)


WINDOW = Window(datetime(2014, 1, 1), datetime(2014, 6, 30, 23, 59))


# --- encodings -----------------------------------------------------------------


def test_color_and_shape_are_stable():
    assert color_for("c1") == color_for("c1")
    assert shape_for("crm") == shape_for("crm")


def test_default_source_is_a_circle_and_others_never_are():
    assert shape_for("default") == "circle"
    for source in ("crm", "billing", "erp", "portal", "legacy"):
        assert shape_for(source) != "circle"


# --- spiral angles ----------------------------------------------------------


def test_day_angle_divides_the_period():
    assert day_angle(1, 30) == 0.0
    assert day_angle(16, 30) == pytest.approx(TWO_PI * 15 / 30)
    assert day_angle(30, 30) == pytest.approx(TWO_PI * 29 / 30)


def test_day_31_clamps_onto_day_30_line():
    assert day_angle(31, 30) == day_angle(30, 30)
    assert day_angle(31, 31) == pytest.approx(TWO_PI * 30 / 31)


def test_same_day_of_month_lands_on_the_same_angle():
    events = [ev(datetime(2014, m, 15, 10, 0)) for m in (1, 2, 3, 4)]
    layout = spiral_layout(events, WINDOW)
    angles = {n.angle for n in layout.nodes}
    assert len(angles) == 1
    radii = [n.radius for n in layout.nodes]
    assert radii == sorted(radii) and len(set(radii)) == 4


def test_spiral_branch_is_month_offset_and_radius_formula_holds():
    events = [ev(datetime(2014, 1, 5, 9, 0)), ev(datetime(2014, 3, 20, 9, 0))]
    layout = spiral_layout(events, WINDOW)
    a, b = layout.nodes
    assert (a.branch, b.branch) == (0, 2)
    for node in layout.nodes:
        assert node.radius == pytest.approx(
            DEFAULT_R0 + DEFAULT_DR * (node.branch + node.angle / TWO_PI)
        )
        bounds = layout.branches[node.branch]
        assert bounds.r_start <= node.radius < bounds.r_end


def test_spiral_branches_cover_the_window_even_without_events():
    layout = spiral_layout([ev(datetime(2014, 1, 5, 9, 0))], WINDOW)
    assert [b.label for b in layout.branches] == [f"2014-{m:02d}" for m in range(1, 7)]


def test_spiral_excludes_out_of_window_events():
    events = [ev(datetime(2013, 12, 31, 23, 59)), ev(datetime(2014, 2, 1, 0, 0)), ev(datetime(2014, 7, 1, 0, 0))]
    layout = spiral_layout(events, WINDOW)
    assert len(layout.nodes) == 1 and layout.excluded == 2


def test_spiral_ticks_one_per_day_division():
    layout = spiral_layout([], WINDOW, period_days=15)
    assert len(layout.ticks) == 15
    assert layout.ticks[0] == 0.0
    assert layout.ticks[1] == pytest.approx(TWO_PI / 15)


def test_spiral_short_period_counts_days_from_window_start():
    window = Window(datetime(2014, 1, 1), datetime(2014, 1, 31, 23, 59))
    events = [
        ev(datetime(2014, 1, 1, 9, 0)),  # offset 0 -> branch 0, day 1
        ev(datetime(2014, 1, 7, 9, 0)),  # offset 6 -> branch 0, day 7
        ev(datetime(2014, 1, 8, 9, 0)),  # offset 7 -> branch 1, day 1
        ev(datetime(2014, 1, 20, 9, 0)),  # offset 19 -> branch 2, day 6
    ]
    layout = spiral_layout(events, window, period_days=7)
    got = [(n.branch, n.day_index) for n in layout.nodes]
    assert got == [(0, 1), (0, 7), (1, 1), (2, 6)]
    assert layout.branches[0].label == "days 1-7"
    assert layout.branches[1].label == "days 8-14"


def test_spiral_validation():
    with pytest.raises(ValueError):
        spiral_layout([], WINDOW, period_days=0)
    with pytest.raises(ValueError):
        spiral_layout([], WINDOW, mode="live")
    with pytest.raises(ValueError):
        spiral_layout([], WINDOW, mode="semi_online")


def test_spiral_color_by_employee():
    events = [ev(datetime(2014, 1, 5, 9, 0), employee="e7")]
    layout = spiral_layout(events, WINDOW, color_by="employee")
    assert layout.nodes[0].color_key == "e7"
    layout = spiral_layout(events, WINDOW)
    assert layout.nodes[0].color_key == "c1"


# --- semi-online mode ---------------------------------------------------------


def test_semi_online_today_is_a_24h_dial():
    now = datetime(2014, 6, 15, 18, 0)
    events = [
        ev(datetime(2014, 6, 15, 0, 0)),
        ev(datetime(2014, 6, 15, 12, 0)),
        ev(datetime(2014, 6, 15, 6, 0)),
    ]
    layout = spiral_layout(events, WINDOW, mode="semi_online", now=now)
    by_hour = {n.event.timestamp.hour: n for n in layout.nodes}
    assert all(n.branch == 0 for n in layout.nodes)
    assert by_hour[0].angle == 0.0
    assert by_hour[12].angle == pytest.approx(math.pi)
    assert by_hour[6].angle == pytest.approx(math.pi / 2)
    assert by_hour[0].radius == pytest.approx(DEFAULT_R0)


def test_semi_online_past_months_move_outward():
    now = datetime(2014, 6, 15, 18, 0)
    events = [
        ev(datetime(2014, 6, 10, 9, 0)),  # this month -> branch 1
        ev(datetime(2014, 5, 10, 9, 0)),  # last month -> branch 2
        ev(datetime(2014, 3, 10, 9, 0)),  # branch 4
    ]
    layout = spiral_layout(events, WINDOW, mode="semi_online", now=now)
    by_month = {n.event.timestamp.month: n for n in layout.nodes}
    assert by_month[6].branch == 1
    assert by_month[5].branch == 2
    assert by_month[3].branch == 4
    # past branches keep the day-of-month angles
    assert by_month[5].angle == pytest.approx(day_angle(10, 30))
    labels = [b.label for b in layout.branches]
    assert labels[0] == "2014-06-15"
    assert labels[1] == "2014-06"
    assert labels[2] == "2014-05"


def test_semi_online_excludes_the_future():
    now = datetime(2014, 6, 15, 18, 0)
    events = [ev(datetime(2014, 6, 16, 9, 0)), ev(datetime(2014, 6, 15, 9, 0))]
    layout = spiral_layout(events, WINDOW, mode="semi_online", now=now)
    assert len(layout.nodes) == 1 and layout.excluded == 1


# --- regions -----------------------------------------------------------------


def cluster_series(day_by_month, client="c1", employee="e1"):
    events = [
        ev(datetime(2014, month, day, 10, 0), employee=employee, client=client)
        for month, day in day_by_month
    ]
    return series(events, client)


def test_cluster_found_for_adjacent_months_near_same_day():
    regions = radial_cluster_regions(cluster_series([(1, 14), (2, 15)]))
    assert len(regions) == 1
    region = regions[0]
    assert (region.day_start, region.day_end) == (14, 15)
    assert region.kind == "radial_cluster"
    assert region.days() == [14, 15]


def test_cluster_runs_merge():
    regions = radial_cluster_regions(cluster_series([(1, 10), (2, 11), (3, 12)]))
    assert [(r.day_start, r.day_end) for r in regions] == [(10, 12)]


def test_cluster_requires_adjacent_months():
    # same days two months apart: no pair in adjacent months
    assert radial_cluster_regions(cluster_series([(1, 14), (3, 14)])) == []


def test_cluster_distance_is_strict():
    assert radial_cluster_regions(cluster_series([(1, 10), (2, 13)])) == []
    regions = radial_cluster_regions(cluster_series([(1, 10), (2, 12)]))
    assert [(r.day_start, r.day_end) for r in regions] == [(10, 12)]


def test_cluster_wraps_across_period_boundary():
    regions = radial_cluster_regions(cluster_series([(1, 29), (2, 1)]))
    assert len(regions) == 1
    region = regions[0]
    assert (region.day_start, region.day_end) == (29, 1)
    assert region.wrapped
    assert region.days() == [29, 30, 1]
    assert region.end_angle > TWO_PI


def test_cluster_same_employee_only():
    mixed = series(
        [ev(datetime(2014, 1, 14, 10, 0), employee="e1"), ev(datetime(2014, 2, 15, 10, 0), employee="e2")]
    )
    assert radial_cluster_regions(mixed) != []
    assert radial_cluster_regions(mixed, same_employee_only=True) == []


def test_cluster_day_31_clamps_into_the_view():
    s = series([ev(datetime(2014, 1, 31, 10, 0)), ev(datetime(2014, 3, 1, 10, 0)), ev(datetime(2014, 2, 28, 10, 0))])
    # day 31 -> 30, day 28 vs 30 distance 2 < 3; day 28 vs day 1 (march) distance 3, not < 3
    regions = radial_cluster_regions(s)
    assert [(r.day_start, r.day_end) for r in regions] == [(28, 30)]


def test_billing_window_eight_days_ending_on_billing_day():
    region = billing_window_region(ClientProfile("c1", billing_day=15))
    assert (region.day_start, region.day_end) == (8, 15)
    assert len(region.days()) == 8
    assert region.kind == "billing_window"


def test_billing_window_wraps_for_early_billing_days():
    region = billing_window_region(ClientProfile("c1", billing_day=3))
    assert (region.day_start, region.day_end) == (26, 3)
    assert region.days() == [26, 27, 28, 29, 30, 1, 2, 3]


def test_billing_window_clamps_day_31():
    region = billing_window_region(ClientProfile("c1", billing_day=31))
    assert (region.day_start, region.day_end) == (23, 30)


def test_billing_window_absent_without_billing_day():
    assert billing_window_region(None) is None
    assert billing_window_region(ClientProfile("c1")) is None


def test_regions_pass_through_spiral():
    region = SectorRegion("billing_window", 8, 15, 30)
    layout = spiral_layout([], WINDOW, regions=(region,))
    assert layout.regions == (region,)
    assert layout.to_dict()["regions"][0]["day_start"] == 8


# --- layered ------------------------------------------------------------------


def test_layered_layout_structure(rng):
    events = [random_event(rng, clients=5, employees=4) for _ in range(60)]
    profiles = {f"c{i}": random_profile(rng, f"c{i}") for i in range(1, 6)}
    clients, _ = rank_all(events, None, default_factors(), profiles, {}, HolidayCalendar())
    layout = layered_layout(events, clients)
    assert [n.node_id for n in layout.clients] == [r.client_id for r in clients]
    assert [n.node_id for n in layout.employees] == sorted({e.employee_id for e in events})
    for edge in layout.edges:
        expected = sum(
            1 for e in events if e.employee_id == edge.employee_id and e.client_id == edge.client_id
        )
        assert edge.count == expected and edge.thickness == float(expected)
    xs = [n.x for n in layout.clients]
    assert xs[0] == 0.0 and xs[-1] == 1.0


def test_layered_layout_client_filter(rng):
    events = [random_event(rng, clients=5, employees=4) for _ in range(40)]
    layout = layered_layout(events, [], client_filter="c1")
    assert all(e.client_id == "c1" for e in layout.edges)
    assert [n.node_id for n in layout.clients] == ["c1"]


def test_layered_layout_unranked_clients_sort_after_ranked():
    events = [ev(datetime(2014, 1, 5, 9, 0), client=c) for c in ("c3", "c1", "c2")]
    clients, _ = rank_all(
        [e for e in events if e.client_id == "c2"], None, default_factors(), {}, {}, HolidayCalendar()
    )
    layout = layered_layout(events, clients)
    assert [n.node_id for n in layout.clients] == ["c2", "c1", "c3"]


def test_layered_single_node_centered():
    layout = layered_layout([ev(datetime(2014, 1, 5, 9, 0))], [])
    assert layout.employees[0].x == 0.5 and layout.clients[0].x == 0.5


# --- timeline ------------------------------------------------------------------

SHIFTS = {"e1": ShiftSchedule("e1", {i: (time(8, 0), time(18, 0)) for i in range(5)})}
CAL = HolidayCalendar()


def test_timeline_bands_and_boxes():
    events = [
        ev(datetime(2014, 3, 10, 9, 0)),
        ev(datetime(2014, 3, 10, 17, 0)),
        ev(datetime(2014, 3, 11, 22, 0)),
        ev(datetime(2014, 3, 15, 10, 0)),  # Saturday
    ]
    layout = timeline_layout(series(events), SHIFTS, CAL)
    assert [d.day.isoformat() for d in layout.days] == ["2014-03-10", "2014-03-11", "2014-03-15"]
    first, second, third = layout.days
    assert len(first.bands["in_shift"]) == 1 and len(first.bands["end_of_shift"]) == 1
    assert first.boxed and not first.all_red
    assert len(second.bands["outside_hours"]) == 1 and not second.boxed
    assert third.all_red
    assert layout.edges == (("2014-03-10", "2014-03-11"), ("2014-03-11", "2014-03-15"))


def test_timeline_keeps_every_raw_event():
    stamp = datetime(2014, 3, 10, 9, 0)
    events = [ev(stamp), ev(stamp, action="refund"), ev(stamp + timedelta(minutes=1))]
    layout = timeline_layout(series(events), SHIFTS, CAL)
    assert sum(len(g) for g in layout.days[0].bands.values()) == 3


# --- stacked bars ----------------------------------------------------------------


def test_stacked_bar_segments_sum_to_the_score(rng):
    events = [random_event(rng, clients=6) for _ in range(80)]
    profiles = {f"c{i}": random_profile(rng, f"c{i}") for i in range(1, 7)}
    clients, _ = rank_all(events, None, default_factors(), profiles, {}, HolidayCalendar())
    data = stacked_bar(clients, top_k=4)
    assert len(data.bars) == min(4, len(clients))
    for bar, ranking in zip(data.bars, clients):
        assert bar.client_id == ranking.client_id
        assert sum((s.length for s in bar.segments), Fraction(0)) == ranking.score
        assert [s.factor_id for s in bar.segments] == [s.factor_id for s in ranking.factor_scores]


def test_stacked_bar_skipped_factor_contributes_nothing(rng):
    events = [ev(datetime(2014, 3, 10, 9, 0))]
    clients, _ = rank_all(events, None, default_factors(), {}, {}, HolidayCalendar())
    (bar,) = stacked_bar(clients).bars
    billing = [s for s in bar.segments if s.factor_id == "billing_distance"]
    assert billing[0].length == 0
