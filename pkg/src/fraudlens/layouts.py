"""Renderer-agnostic layout geometry for the coordinated views.

The spiral winds one branch per period (a month by default) with one tick
line per day division, so periodic activity stacks on a ray. Angles use a
fixed division of the period: day d sits at 2*pi*(d-1)/period_days, and day
31 clamps onto the last line of a 30-day view, keeping same-day-of-month
events on identical angles across months.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from datetime import date, datetime
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .calendars import ClientProfile, HolidayCalendar, ShiftSchedule, classify_time_of_day
from .events import Event, EventSeries, Window
from .ranking import ClientRanking

DEFAULT_PERIOD_DAYS = 30
DEFAULT_R0 = 40.0
DEFAULT_DR = 26.0
MODE_OFFLINE = "offline"
MODE_SEMI_ONLINE = "semi_online"
REGION_BILLING = "billing_window"
REGION_CLUSTER = "radial_cluster"

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
    "#5254a3", "#8ca252", "#bd9e39", "#ad494a", "#a55194",
)
SHAPES = ("circle", "square", "triangle", "diamond", "cross")


def _stable_hash(key: str) -> int:
    return int(hashlib.sha1(key.encode("utf-8")).hexdigest()[:8], 16)


def color_for(key: str) -> str:
    return PALETTE[_stable_hash(key) % len(PALETTE)]


def shape_for(source_system: str) -> str:
    if source_system == "default":
        return "circle"
    return SHAPES[1 + _stable_hash(source_system) % (len(SHAPES) - 1)]


def day_index_for(day_of_month: int, period_days: int) -> int:
    """Map a calendar day onto the view's day divisions (day 31 clamps)."""
    return min(day_of_month, period_days)


def day_angle(day_of_month: int, period_days: int) -> float:
    return 2.0 * math.pi * (day_index_for(day_of_month, period_days) - 1) / period_days


def _month_number(d: date) -> int:
    return d.year * 12 + (d.month - 1)


def _month_label(month_number: int) -> str:
    return f"{month_number // 12:04d}-{month_number % 12 + 1:02d}"


@dataclass(frozen=True)
class SpiralNode:
    event: Event
    branch: int
    day_index: int
    angle: float
    radius: float
    color_key: str
    shape_key: str

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_record(),
            "event_key": self.event.key,
            "branch": self.branch,
            "day_index": self.day_index,
            "angle": self.angle,
            "radius": self.radius,
            "color_key": self.color_key,
            "color": color_for(self.color_key),
            "shape": shape_for(self.shape_key),
        }


@dataclass(frozen=True)
class SpiralBranch:
    index: int
    label: str
    r_start: float
    r_end: float

    def to_dict(self) -> dict:
        return {"index": self.index, "label": self.label, "r_start": self.r_start, "r_end": self.r_end}


@dataclass(frozen=True)
class SectorRegion:
    """Angular sector covering an inclusive cyclic day span of the period."""

    kind: str
    day_start: int
    day_end: int
    period_days: int

    @property
    def wrapped(self) -> bool:
        return self.day_end < self.day_start

    @property
    def start_angle(self) -> float:
        return 2.0 * math.pi * (self.day_start - 1) / self.period_days

    @property
    def end_angle(self) -> float:
        # exclusive outer edge of day_end; beyond 2*pi when the span wraps
        end = 2.0 * math.pi * self.day_end / self.period_days
        return end + 2.0 * math.pi if self.wrapped else end

    def days(self) -> list[int]:
        if not self.wrapped:
            return list(range(self.day_start, self.day_end + 1))
        return list(range(self.day_start, self.period_days + 1)) + list(range(1, self.day_end + 1))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "day_start": self.day_start,
            "day_end": self.day_end,
            "start_angle": self.start_angle,
            "end_angle": self.end_angle,
        }


@dataclass(frozen=True)
class SpiralLayout:
    client_id: str
    period_days: int
    mode: str
    nodes: tuple[SpiralNode, ...]
    branches: tuple[SpiralBranch, ...]
    regions: tuple[SectorRegion, ...]
    ticks: tuple[float, ...]
    excluded: int
    r0: float
    dr: float

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "period_days": self.period_days,
            "mode": self.mode,
            "nodes": [n.to_dict() for n in self.nodes],
            "branches": [b.to_dict() for b in self.branches],
            "regions": [r.to_dict() for r in self.regions],
            "ticks": list(self.ticks),
            "excluded": self.excluded,
            "r0": self.r0,
            "dr": self.dr,
        }


def _month_aligned(period_days: int) -> bool:
    return period_days in (30, 31)


def spiral_layout(
    events: Iterable[Event],
    window: Window,
    period_days: int = DEFAULT_PERIOD_DAYS,
    mode: str = MODE_OFFLINE,
    *,
    client_id: str = "",
    now: datetime | None = None,
    regions: Sequence[SectorRegion] = (),
    color_by: str = "client",
    r0: float = DEFAULT_R0,
    dr: float = DEFAULT_DR,
) -> SpiralLayout:
    """Place post-dedup events on the spiral.

    Offline mode: the inner branch is the window's earliest month (or
    period-sized block for 7/15-day views) and radius grows with time.
    Semi-online mode: branch 0 is the current day laid out as a 24-hour
    dial, with whole prior months on the outer branches, so the freshest
    activity sits innermost. Events outside the window are excluded and
    counted.
    """
    if period_days < 1:
        raise ValueError(f"period_days must be positive, got {period_days}")
    if mode not in (MODE_OFFLINE, MODE_SEMI_ONLINE):
        raise ValueError(f"unknown spiral mode {mode!r}")
    if mode == MODE_SEMI_ONLINE and now is None:
        raise ValueError("semi_online mode requires 'now'")

    month_view = _month_aligned(period_days)
    base_month = _month_number(window.start.date())
    base_date = window.start.date()

    nodes: list[SpiralNode] = []
    excluded = 0
    max_branch = 0
    for event in sorted(events, key=lambda e: e.sort_key()):
        if not window.contains(event.timestamp):
            excluded += 1
            continue
        if mode == MODE_SEMI_ONLINE and event.date > now.date():
            excluded += 1
            continue
        if mode == MODE_SEMI_ONLINE and event.date == now.date():
            branch = 0
            minutes = event.timestamp.hour * 60 + event.timestamp.minute
            frac = minutes / 1440.0
            angle = 2.0 * math.pi * frac
            day_index = day_index_for(event.timestamp.day, period_days)
        else:
            if month_view:
                months = _month_number(event.date) - base_month
                day_index = day_index_for(event.timestamp.day, period_days)
            else:
                offset = (event.date - base_date).days
                months = offset // period_days
                day_index = offset % period_days + 1
            angle = 2.0 * math.pi * (day_index - 1) / period_days
            frac = angle / (2.0 * math.pi)
            if mode == MODE_SEMI_ONLINE:
                months_back = _month_number(now.date()) - _month_number(event.date)
                branch = 1 + months_back
            else:
                branch = months
        radius = r0 + dr * (branch + frac)
        color_key = event.employee_id if color_by == "employee" else event.client_id
        nodes.append(SpiralNode(event, branch, day_index, angle, radius, color_key, event.source_system))
        max_branch = max(max_branch, branch)

    branches: list[SpiralBranch] = []
    if mode == MODE_SEMI_ONLINE:
        span = max(max_branch, 1 + _month_number(now.date()) - base_month)
        for index in range(span + 1):
            label = now.date().isoformat() if index == 0 else _month_label(_month_number(now.date()) - (index - 1))
            branches.append(SpiralBranch(index, label, r0 + dr * index, r0 + dr * (index + 1)))
    else:
        if month_view:
            span = max(max_branch, _month_number(window.end.date()) - base_month)
        else:
            span = max(max_branch, (window.end.date() - base_date).days // period_days)
        for index in range(span + 1):
            if month_view:
                label = _month_label(base_month + index)
            else:
                first = index * period_days + 1
                label = f"days {first}-{first + period_days - 1}"
            branches.append(SpiralBranch(index, label, r0 + dr * index, r0 + dr * (index + 1)))

    ticks = tuple(2.0 * math.pi * k / period_days for k in range(period_days))
    return SpiralLayout(
        client_id=client_id,
        period_days=period_days,
        mode=mode,
        nodes=tuple(nodes),
        branches=tuple(branches),
        regions=tuple(regions),
        ticks=ticks,
        excluded=excluded,
        r0=r0,
        dr=dr,
    )


def _cyclic_distance(a: int, b: int, period_days: int) -> int:
    d = abs(a - b) % period_days
    return min(d, period_days - d)


def _runs_from_days(days: set[int], period_days: int, kind: str) -> list[SectorRegion]:
    if not days:
        return []
    if len(days) >= period_days:
        return [SectorRegion(kind, 1, period_days, period_days)]
    ordered = sorted(days)
    runs: list[list[int]] = [[ordered[0], ordered[0]]]
    for day in ordered[1:]:
        if day == runs[-1][1] + 1:
            runs[-1][1] = day
        else:
            runs.append([day, day])
    # wrap: a run ending at the last day joins one starting at day 1
    if len(runs) > 1 and runs[0][0] == 1 and runs[-1][1] == period_days:
        first = runs.pop(0)
        runs[-1][1] = first[1]
    regions = [SectorRegion(kind, start, end, period_days) for start, end in runs]
    regions.sort(key=lambda r: r.day_start)
    return regions


def radial_cluster_regions(
    series: EventSeries,
    delta_days: int = 3,
    *,
    period_days: int = DEFAULT_PERIOD_DAYS,
    same_employee_only: bool = False,
) -> list[SectorRegion]:
    """Sectors where activity recurs on nearly the same day month over month.

    A pair of events in adjacent calendar months qualifies when their day
    indices differ by less than delta_days cyclically; each pair covers the
    short arc between its days and overlapping sectors merge.
    """
    by_month: dict[int, list[tuple[int, str]]] = {}
    for event in series:
        month = _month_number(event.date)
        day = day_index_for(event.timestamp.day, period_days)
        by_month.setdefault(month, []).append((day, event.employee_id))

    covered: set[int] = set()
    for month, entries in by_month.items():
        nxt = by_month.get(month + 1)
        if not nxt:
            continue
        for day_a, emp_a in entries:
            for day_b, emp_b in nxt:
                if same_employee_only and emp_a != emp_b:
                    continue
                d = abs(day_a - day_b) % period_days
                if min(d, period_days - d) >= delta_days:
                    continue
                if d <= period_days - d:
                    lo, hi = min(day_a, day_b), max(day_a, day_b)
                    covered.update(range(lo, hi + 1))
                else:
                    lo, hi = max(day_a, day_b), min(day_a, day_b)
                    covered.update(range(lo, period_days + 1))
                    covered.update(range(1, hi + 1))
    return _runs_from_days(covered, period_days, REGION_CLUSTER)


def billing_window_region(
    profile: ClientProfile | None,
    period_days: int = DEFAULT_PERIOD_DAYS,
) -> SectorRegion | None:
    """Sector for the week leading up to the billing day (8 days inclusive)."""
    if profile is None or profile.billing_day is None:
        return None
    end = day_index_for(profile.billing_day, period_days)
    start = (end - 7 - 1) % period_days + 1
    return SectorRegion(REGION_BILLING, start, end, period_days)


@dataclass(frozen=True)
class LayerNode:
    node_id: str
    x: float
    color: str

    def to_dict(self) -> dict:
        return {"id": self.node_id, "x": self.x, "color": self.color}


@dataclass(frozen=True)
class LayerEdge:
    employee_id: str
    client_id: str
    count: int
    thickness: float

    def to_dict(self) -> dict:
        return {
            "employee_id": self.employee_id,
            "client_id": self.client_id,
            "count": self.count,
            "thickness": self.thickness,
        }


@dataclass(frozen=True)
class LayeredLayout:
    employees: tuple[LayerNode, ...]
    clients: tuple[LayerNode, ...]
    edges: tuple[LayerEdge, ...]

    def to_dict(self) -> dict:
        return {
            "employees": [n.to_dict() for n in self.employees],
            "clients": [n.to_dict() for n in self.clients],
            "edges": [e.to_dict() for e in self.edges],
        }


def _spread(count: int, position: int) -> float:
    if count <= 1:
        return 0.5
    return position / (count - 1)


def layered_layout(
    events: Iterable[Event],
    client_rankings: Sequence[ClientRanking],
    client_filter: str | None = None,
) -> LayeredLayout:
    """Bipartite employee/client graph; clients keep their ranking order."""
    counts: dict[tuple[str, str], int] = {}
    for event in events:
        if client_filter is not None and event.client_id != client_filter:
            continue
        counts[(event.employee_id, event.client_id)] = counts.get((event.employee_id, event.client_id), 0) + 1

    client_ids = {client for _, client in counts}
    ranked = [r.client_id for r in client_rankings if r.client_id in client_ids]
    ranked += sorted(client_ids - set(ranked))
    employees = sorted({employee for employee, _ in counts})

    employee_nodes = tuple(
        LayerNode(employee, _spread(len(employees), i), color_for(employee))
        for i, employee in enumerate(employees)
    )
    client_nodes = tuple(
        LayerNode(client, _spread(len(ranked), i), color_for(client))
        for i, client in enumerate(ranked)
    )
    edges = tuple(
        LayerEdge(employee, client, count, float(count))
        for (employee, client), count in sorted(counts.items())
    )
    return LayeredLayout(employee_nodes, client_nodes, edges)


@dataclass(frozen=True)
class TimelineDay:
    day: date
    bands: Mapping[str, tuple[Event, ...]]
    boxed: bool
    all_red: bool

    def to_dict(self) -> dict:
        return {
            "date": self.day.isoformat(),
            "bands": {band: [e.to_record() for e in group] for band, group in self.bands.items()},
            "event_keys": {band: [e.key for e in group] for band, group in self.bands.items()},
            "boxed": self.boxed,
            "all_red": self.all_red,
        }


@dataclass(frozen=True)
class TimelineLayout:
    client_id: str
    days: tuple[TimelineDay, ...]
    edges: tuple[tuple[str, str], ...]  # consecutive day connectors

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "days": [d.to_dict() for d in self.days],
            "edges": [list(edge) for edge in self.edges],
        }


def timeline_layout(
    series: EventSeries,
    shifts: Mapping[str, ShiftSchedule],
    holidays: HolidayCalendar,
    end_of_shift_minutes: int = 120,
) -> TimelineLayout:
    """Per-day nodes with in-shift / end-of-shift / outside bands.

    Every raw event appears (no dedup here); days with two or more events
    are boxed and weekend/holiday days marked all-red.
    """
    by_day: dict[date, dict[str, list[Event]]] = {}
    for event in series:
        bands = by_day.setdefault(event.date, {"in_shift": [], "end_of_shift": [], "outside_hours": []})
        cls = classify_time_of_day(
            event.timestamp, shifts.get(event.employee_id), holidays, end_of_shift_minutes
        )
        bands[cls].append(event)

    days = []
    for day in sorted(by_day):
        bands = by_day[day]
        total = sum(len(group) for group in bands.values())
        days.append(
            TimelineDay(
                day,
                {band: tuple(group) for band, group in bands.items()},
                boxed=total >= 2,
                all_red=holidays.is_nonworking(day),
            )
        )
    edges = tuple(
        (days[i].day.isoformat(), days[i + 1].day.isoformat()) for i in range(len(days) - 1)
    )
    return TimelineLayout(series.client_id, tuple(days), edges)


@dataclass(frozen=True)
class BarSegment:
    factor_id: str
    performance: int
    length: Fraction

    def to_dict(self) -> dict:
        return {
            "factor_id": self.factor_id,
            "performance": self.performance,
            "length": float(self.length),
            "length_exact": str(self.length),
        }


@dataclass(frozen=True)
class StackedBar:
    client_id: str
    score: Fraction
    segments: tuple[BarSegment, ...]

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "score": float(self.score),
            "score_exact": str(self.score),
            "segments": [s.to_dict() for s in self.segments],
        }


@dataclass(frozen=True)
class StackedBarData:
    bars: tuple[StackedBar, ...]

    def to_dict(self) -> dict:
        return {"bars": [b.to_dict() for b in self.bars]}


def stacked_bar(rankings: Sequence[ClientRanking], top_k: int = 10) -> StackedBarData:
    """Score decomposition bars for the top-k clients.

    Segments follow the factor rank order; each has length a_f * w_f using
    the client's effective (renormalized) weights, so segment lengths add up
    to the client score exactly.
    """
    bars = []
    for ranking in rankings[:top_k]:
        weight_by_factor = dict(ranking.weights)
        segments = tuple(
            BarSegment(
                score.factor_id,
                score.performance,
                Fraction(score.performance) * weight_by_factor.get(score.factor_id, Fraction(0)),
            )
            for score in ranking.factor_scores
        )
        bars.append(StackedBar(ranking.client_id, ranking.score, segments))
    return StackedBarData(tuple(bars))
