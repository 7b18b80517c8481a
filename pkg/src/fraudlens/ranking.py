"""Severity factors, rank-sum weights, and client/employee ranking.

Each factor classifies a client's event-series as low/medium/high severity
(performance 0/1/2). The client score is the weighted sum of performances,
with weights derived from the auditor's factor ordering by the rank-sum
formula: w_f = (N - r_f + 1) / sum_j (N - r_j + 1). All score arithmetic is
exact rational so rankings are reproducible and tie-breaks meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .calendars import (
    END_OF_SHIFT,
    OUTSIDE_HOURS,
    STATUS_BLACKLISTED,
    STATUS_SUSPECT,
    TARGET_BILLING,
    ClientProfile,
    HolidayCalendar,
    ShiftSchedule,
    classify_time_of_day,
    distance_to_billing,
)
from .events import ConfigError, Event, EventSeries, Window
from .periodicity import proper_period

FACTOR_BILLING = "billing_distance"
FACTOR_PERIODICITY = "periodicity"
FACTOR_WORKING_HOURS = "working_hours"
FACTOR_CONCENTRATION = "employee_concentration"
FACTOR_ACTION = "action_name"
FACTOR_STATUS = "client_status"

FACTOR_IDS = (
    FACTOR_BILLING,
    FACTOR_PERIODICITY,
    FACTOR_WORKING_HOURS,
    FACTOR_CONCENTRATION,
    FACTOR_ACTION,
    FACTOR_STATUS,
)

SEVERITY_BY_PERFORMANCE = {0: "low", 1: "medium", 2: "high"}

DEFAULT_THRESHOLDS: dict[str, dict] = {
    FACTOR_BILLING: {
        "near_days": 3,
        "week_days": 7,
        "distant_threshold": 5,
        "target": TARGET_BILLING,
        "literal_combined_high": False,
    },
    FACTOR_PERIODICITY: {
        "high_min": 27,
        "high_max": 31,
        "medium_min": 20,
        "min_events": 3,
        "min_support": 0.5,
    },
    FACTOR_WORKING_HOURS: {
        "end_of_shift_minutes": 120,
        "min_end_of_shift_events": 2,
    },
    FACTOR_CONCENTRATION: {"percent": 50},
    FACTOR_ACTION: {},
    FACTOR_STATUS: {},
}


@dataclass(frozen=True)
class FactorConfig:
    factor_id: str
    rank_position: int
    thresholds: dict = field(default_factory=dict)
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.factor_id not in FACTOR_IDS:
            raise ConfigError(f"unknown factor id {self.factor_id!r}")
        if self.rank_position < 1:
            raise ConfigError(f"rank_position must be >= 1, got {self.rank_position}")

    def threshold(self, key: str):
        if key in self.thresholds:
            return self.thresholds[key]
        return DEFAULT_THRESHOLDS[self.factor_id][key]


@dataclass(frozen=True)
class FactorScore:
    factor_id: str
    performance: int
    severity: str
    explanation: str
    skipped: bool = False

    def __post_init__(self) -> None:
        if self.performance not in (0, 1, 2):
            raise ValueError(f"performance must be 0, 1 or 2, got {self.performance}")
        if self.severity != SEVERITY_BY_PERFORMANCE[self.performance]:
            raise ValueError(f"severity {self.severity!r} inconsistent with performance {self.performance}")


def _score(factor_id: str, performance: int, explanation: str) -> FactorScore:
    return FactorScore(factor_id, performance, SEVERITY_BY_PERFORMANCE[performance], explanation)


def _skipped(factor_id: str, explanation: str) -> FactorScore:
    return FactorScore(factor_id, 0, "low", explanation, skipped=True)


@dataclass(frozen=True)
class ClientRanking:
    client_id: str
    score: Fraction
    factor_scores: tuple[FactorScore, ...]
    weights: tuple[tuple[str, Fraction], ...]  # renormalized over non-skipped factors

    @property
    def score_float(self) -> float:
        return float(self.score)


@dataclass(frozen=True)
class EmployeeRanking:
    employee_id: str
    score: Fraction
    contributing_client: str | None
    mode: str  # "max" or "threshold"


@dataclass(frozen=True)
class ActionRules:
    """Auditor rules: forbidden actions (with per-action authorized employees)
    and suspicious-but-permitted actions. Unlisted actions are low severity."""

    forbidden: Mapping[str, frozenset[str]] = field(default_factory=dict)
    suspicious: frozenset[str] = frozenset()

    @classmethod
    def from_dict(cls, obj: dict) -> "ActionRules":
        if not isinstance(obj, dict):
            raise ConfigError("action rules must be a JSON object")
        forbidden_raw = obj.get("forbidden", {})
        if isinstance(forbidden_raw, list):
            forbidden_raw = {str(a): [] for a in forbidden_raw}
        if not isinstance(forbidden_raw, dict):
            raise ConfigError("action rules 'forbidden' must map action -> authorized employee list")
        forbidden: dict[str, frozenset[str]] = {}
        for action, authorized in forbidden_raw.items():
            if not isinstance(authorized, (list, tuple)):
                raise ConfigError(f"authorized list for action {action!r} must be an array")
            forbidden[str(action)] = frozenset(str(e) for e in authorized)
        suspicious_raw = obj.get("suspicious", [])
        if not isinstance(suspicious_raw, (list, tuple)):
            raise ConfigError("action rules 'suspicious' must be an array of action codes")
        return cls(forbidden=forbidden, suspicious=frozenset(str(a) for a in suspicious_raw))

    def to_dict(self) -> dict:
        return {
            "forbidden": {a: sorted(auth) for a, auth in sorted(self.forbidden.items())},
            "suspicious": sorted(self.suspicious),
        }


def rank_weights(ordering: Sequence[int]) -> list[Fraction]:
    """Rank-sum weights for a factor ordering (rank 1 = most important).

    ``ordering[i]`` is the rank position of factor i; the result keeps factor
    order. Weights are positive, strictly decreasing in rank position, and
    sum to exactly 1.
    """
    n = len(ordering)
    if n < 1 or sorted(ordering) != list(range(1, n + 1)):
        raise ConfigError(f"factor ordering must be a permutation of 1..N, got {list(ordering)}")
    denominator = sum(n - r + 1 for r in ordering)  # == n (n + 1) / 2
    return [Fraction(n - r + 1, denominator) for r in ordering]


def factor_billing_distance(
    series: EventSeries,
    profile: ClientProfile | None,
    cfg: FactorConfig,
) -> FactorScore:
    """Classify by how the client's events crowd the next billing/due date."""
    target = cfg.threshold("target")
    day = profile.day_for(target) if profile is not None else None
    if day is None:
        return _skipped(cfg.factor_id, f"no {target} day on file; factor skipped")
    near, week = cfg.threshold("near_days"), cfg.threshold("week_days")
    thres = cfg.threshold("distant_threshold")
    d0 = d1 = d2 = 0
    for event in series:
        distance = distance_to_billing(event.timestamp, profile, target)
        if distance <= near:
            d0 += 1
        elif distance <= week:
            d1 += 1
        else:
            d2 += 1
    evidence = f"|D0|={d0}, |D1|={d1}, |D2|={d2} (target={target})"
    combined_high = (d0 + d1 >= 2) if cfg.threshold("literal_combined_high") else (d0 >= 1 and d0 + d1 >= 2)
    if d0 >= 2 or d1 >= 3 or combined_high:
        return _score(cfg.factor_id, 2, evidence)
    if d0 == 1 or d1 in (1, 2) or d2 > thres:
        return _score(cfg.factor_id, 1, evidence)
    return _score(cfg.factor_id, 0, evidence)


def factor_periodicity(series: EventSeries, cfg: FactorConfig) -> FactorScore:
    """Classify by the proper period of activity: monthly-looking is high."""
    if len(series.events) < cfg.threshold("min_events"):
        return _score(cfg.factor_id, 0, f"insufficient data ({len(series.events)} events)")
    estimate = proper_period(series, min_support=cfg.threshold("min_support"))
    if not estimate.found:
        return _score(cfg.factor_id, 0, "no dominant period")
    p = estimate.period_days
    evidence = f"period={p}d, support={estimate.support:.2f}"
    if cfg.threshold("high_min") <= p <= cfg.threshold("high_max"):
        return _score(cfg.factor_id, 2, evidence)
    if cfg.threshold("medium_min") <= p < cfg.threshold("high_min"):
        return _score(cfg.factor_id, 1, evidence)
    return _score(cfg.factor_id, 0, evidence)


def factor_working_hours(
    series: EventSeries,
    shifts: Mapping[str, ShiftSchedule],
    holidays: HolidayCalendar,
    cfg: FactorConfig,
) -> FactorScore:
    """Classify by events outside working hours / at the end of shifts."""
    end_window = cfg.threshold("end_of_shift_minutes")
    outside = end_of_shift = 0
    missing_schedule = False
    for event in series:
        schedule = shifts.get(event.employee_id)
        if schedule is None:
            missing_schedule = True
        cls = classify_time_of_day(event.timestamp, schedule, holidays, end_window)
        if cls == OUTSIDE_HOURS:
            outside += 1
        elif cls == END_OF_SHIFT:
            end_of_shift += 1
    evidence = f"outside={outside}, end_of_shift={end_of_shift}"
    if missing_schedule:
        evidence += "; schedule missing for some employees"
    if outside >= 1:
        return _score(cfg.factor_id, 2, evidence)
    if end_of_shift >= cfg.threshold("min_end_of_shift_events"):
        return _score(cfg.factor_id, 1, evidence)
    return _score(cfg.factor_id, 0, evidence)


def factor_employee_concentration(series: EventSeries, cfg: FactorConfig) -> FactorScore:
    """Classify by how few employees account for most of the client's events.

    k = size of the smallest employee set whose combined event count exceeds
    the configured percentage (default 50%), found greedily over descending
    counts. k=1 is high, k in {2,3} medium, larger low.
    """
    counts: dict[str, int] = {}
    for event in series:
        counts[event.employee_id] = counts.get(event.employee_id, 0) + 1
    total = len(series.events)
    if total == 0:
        return _score(cfg.factor_id, 0, "no events")
    percent = Fraction(str(cfg.threshold("percent")))
    covered = 0
    k = 0
    for count in sorted(counts.values(), reverse=True):
        covered += count
        k += 1
        if covered * 100 > total * percent:
            break
    evidence = f"{k} of {len(counts)} employees cover {covered}/{total} events"
    if k == 1:
        return _score(cfg.factor_id, 2, evidence)
    if k in (2, 3):
        return _score(cfg.factor_id, 1, evidence)
    return _score(cfg.factor_id, 0, evidence)


def factor_action(series: EventSeries, rules: ActionRules, cfg: FactorConfig) -> FactorScore:
    """Classify by forbidden / suspicious action codes in the series."""
    suspicious_hit: str | None = None
    for event in series:
        authorized = rules.forbidden.get(event.action)
        if authorized is not None and event.employee_id not in authorized:
            return _score(cfg.factor_id, 2, f"forbidden action {event.action} by {event.employee_id}")
        if suspicious_hit is None and event.action in rules.suspicious:
            suspicious_hit = event.action
    if suspicious_hit is not None:
        return _score(cfg.factor_id, 1, f"suspicious action {suspicious_hit}")
    return _score(cfg.factor_id, 0, "no flagged actions")


def factor_status(profile: ClientProfile | None, cfg: FactorConfig) -> FactorScore:
    """Classify by the auditor's marking from previous investigations."""
    status = profile.status if profile is not None else "cleared"
    if status == STATUS_BLACKLISTED:
        return _score(cfg.factor_id, 2, "client is blacklisted")
    if status == STATUS_SUSPECT:
        return _score(cfg.factor_id, 1, "client is a suspect")
    return _score(cfg.factor_id, 0, "client is cleared")


def validate_factor_configs(configs: Sequence[FactorConfig]) -> list[FactorConfig]:
    """Return enabled factors sorted by rank position, which must form 1..N."""
    seen: set[str] = set()
    for cfg in configs:
        if cfg.factor_id in seen:
            raise ConfigError(f"factor {cfg.factor_id!r} configured twice")
        seen.add(cfg.factor_id)
    enabled = [cfg for cfg in configs if cfg.enabled]
    if not enabled:
        raise ConfigError("at least one factor must be enabled")
    rank_weights([cfg.rank_position for cfg in enabled])  # validates the permutation
    return sorted(enabled, key=lambda cfg: cfg.rank_position)


def evaluate_client(
    series: EventSeries,
    profile: ClientProfile | None,
    shifts: Mapping[str, ShiftSchedule],
    holidays: HolidayCalendar,
    enabled_configs: Sequence[FactorConfig],
    action_rules: ActionRules,
) -> list[FactorScore]:
    scores: list[FactorScore] = []
    for cfg in enabled_configs:
        if cfg.factor_id == FACTOR_BILLING:
            scores.append(factor_billing_distance(series, profile, cfg))
        elif cfg.factor_id == FACTOR_PERIODICITY:
            scores.append(factor_periodicity(series, cfg))
        elif cfg.factor_id == FACTOR_WORKING_HOURS:
            scores.append(factor_working_hours(series, shifts, holidays, cfg))
        elif cfg.factor_id == FACTOR_CONCENTRATION:
            scores.append(factor_employee_concentration(series, cfg))
        elif cfg.factor_id == FACTOR_ACTION:
            scores.append(factor_action(series, action_rules, cfg))
        elif cfg.factor_id == FACTOR_STATUS:
            scores.append(factor_status(profile, cfg))
    return scores


def rank_client(
    client_id: str,
    factor_scores: Sequence[FactorScore],
    weights: Sequence[tuple[str, Fraction]],
) -> ClientRanking:
    """Combine factor performances into the weighted client score.

    Skipped factors (missing data) are excluded and the remaining weights
    renormalized, keeping scores in [0, 2] and comparable across clients.
    """
    if [s.factor_id for s in factor_scores] != [fid for fid, _ in weights]:
        raise ValueError("factor scores and weights cover different factor sets")
    active = [(s, w) for s, (_, w) in zip(factor_scores, weights) if not s.skipped]
    weight_sum = sum((w for _, w in active), Fraction(0))
    if weight_sum == 0:
        return ClientRanking(client_id, Fraction(0), tuple(factor_scores), ())
    effective = tuple((s.factor_id, w / weight_sum) for s, w in active)
    score = sum((Fraction(s.performance) * w for (s, _), (_, w) in zip(active, effective)), Fraction(0))
    return ClientRanking(client_id, score, tuple(factor_scores), effective)


def rank_employee(
    employee_id: str,
    served_clients: Iterable[str],
    client_rankings: Mapping[str, ClientRanking],
    mode: str = "max",
    tau: Fraction = Fraction(1),
) -> EmployeeRanking:
    """Score an employee from the clients they served.

    max mode: the employee inherits the highest client score (a suspicious
    client makes its employees suspicious). threshold mode: count of served
    clients scoring above tau.
    """
    served = sorted(set(served_clients))
    if mode == "max":
        best: ClientRanking | None = None
        for client_id in served:
            ranking = client_rankings.get(client_id)
            if ranking is None:
                continue
            if best is None or ranking.score > best.score:
                best = ranking
        if best is None:
            return EmployeeRanking(employee_id, Fraction(0), None, "max")
        return EmployeeRanking(employee_id, best.score, best.client_id, "max")
    if mode == "threshold":
        hits = [c for c in served if c in client_rankings and client_rankings[c].score > tau]
        return EmployeeRanking(employee_id, Fraction(len(hits)), None, "threshold")
    raise ConfigError(f"unknown employee ranking mode {mode!r}")


def rank_all(
    store,
    window: Window | None,
    factor_configs: Sequence[FactorConfig],
    profiles: Mapping[str, ClientProfile],
    shifts: Mapping[str, ShiftSchedule],
    holidays: HolidayCalendar,
    action_rules: ActionRules | None = None,
    *,
    employee_mode: str = "max",
    tau: Fraction = Fraction(1),
) -> tuple[list[ClientRanking], list[EmployeeRanking]]:
    """Rank every client and employee with at least one event in scope.

    ``store`` is anything with ``all_events(window)``. Output order is
    deterministic: descending score, ties broken by ascending id.
    """
    enabled = validate_factor_configs(factor_configs)
    weights = rank_weights([cfg.rank_position for cfg in enabled])
    weight_pairs = list(zip([cfg.factor_id for cfg in enabled], weights))
    rules = action_rules or ActionRules()

    events = store.all_events(window) if hasattr(store, "all_events") else list(store)
    by_client: dict[str, list[Event]] = {}
    served_by_employee: dict[str, set[str]] = {}
    for event in events:
        if window is not None and not window.contains(event.timestamp):
            continue
        by_client.setdefault(event.client_id, []).append(event)
        served_by_employee.setdefault(event.employee_id, set()).add(event.client_id)

    client_rankings: list[ClientRanking] = []
    for client_id in sorted(by_client):
        series = EventSeries.build(client_id, by_client[client_id])
        scores = evaluate_client(
            series, profiles.get(client_id), shifts, holidays, enabled, rules
        )
        client_rankings.append(rank_client(client_id, scores, weight_pairs))
    client_rankings.sort(key=lambda r: (-r.score, r.client_id))

    by_id = {r.client_id: r for r in client_rankings}
    employee_rankings = [
        rank_employee(employee_id, served, by_id, employee_mode, tau)
        for employee_id, served in sorted(served_by_employee.items())
    ]
    employee_rankings.sort(key=lambda r: (-r.score, r.employee_id))
    return client_rankings, employee_rankings
