"""Event filtering: view predicates and the query/export expression grammar.

View predicates mirror the interactive controls (time-of-day class, factor
severity, minimum event count, action/employee sets) and combine as a
conjunction. The expression grammar serves query/export:
``clause (AND clause)*`` where a clause is ``field op value``. String fields
(employee_id, client_id, action, source_system) support ``=`` and ``!=``;
timestamp supports ``=``, ``!=``, ``<``, ``<=``, ``>``, ``>=`` against
minute-precision ISO values. Values may be bare or quoted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Mapping

from .calendars import HolidayCalendar, ShiftSchedule, classify_time_of_day
from .events import CANONICAL_FIELDS, Event, parse_timestamp

STRING_FIELDS = ("employee_id", "client_id", "action", "source_system")
STRING_OPS = ("=", "!=")
TIMESTAMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


class FilterSyntaxError(ValueError):
    """Malformed filter expression; carries the character position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN = re.compile(
    r"""(?P<op>>=|<=|!=|=|<|>)"""
    r"""|(?P<quoted>"[^"]*"|'[^']*')"""
    r"""|(?P<bare>[^\s=!<>"']+)"""
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None:
            raise FilterSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup or "bare"
        value = match.group()
        if kind == "quoted":
            value = value[1:-1]
        tokens.append((kind, value, pos))
        pos = match.end()
    return tokens


@dataclass(frozen=True)
class FilterClause:
    field: str
    op: str
    value: str | datetime

    def matches(self, event: Event) -> bool:
        if self.field == "timestamp":
            lhs, rhs = event.timestamp, self.value
            if self.op == "=":
                return lhs == rhs
            if self.op == "!=":
                return lhs != rhs
            if self.op == "<":
                return lhs < rhs
            if self.op == "<=":
                return lhs <= rhs
            if self.op == ">":
                return lhs > rhs
            return lhs >= rhs
        actual = getattr(event, self.field)
        return actual == self.value if self.op == "=" else actual != self.value


@dataclass(frozen=True)
class FilterSet:
    clauses: tuple[FilterClause, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "FilterSet":
        tokens = _tokenize(text)
        if not tokens:
            return cls(())
        clauses: list[FilterClause] = []
        i = 0
        while True:
            if i >= len(tokens):
                raise FilterSyntaxError("expected a field name", len(text))
            kind, field, pos = tokens[i]
            if kind != "bare" or field not in CANONICAL_FIELDS:
                raise FilterSyntaxError(f"unknown field {field!r}", pos)
            i += 1
            if i >= len(tokens) or tokens[i][0] != "op":
                at = tokens[i][2] if i < len(tokens) else len(text)
                raise FilterSyntaxError(f"expected an operator after {field!r}", at)
            _, op, op_pos = tokens[i]
            allowed = TIMESTAMP_OPS if field == "timestamp" else STRING_OPS
            if op not in allowed:
                raise FilterSyntaxError(f"operator {op!r} not allowed for field {field!r}", op_pos)
            i += 1
            if i >= len(tokens) or tokens[i][0] == "op":
                at = tokens[i][2] if i < len(tokens) else len(text)
                raise FilterSyntaxError("expected a value", at)
            _, raw_value, value_pos = tokens[i]
            i += 1
            value: str | datetime = raw_value
            if field == "timestamp":
                try:
                    value = parse_timestamp(raw_value)
                except ValueError:
                    raise FilterSyntaxError(f"bad timestamp {raw_value!r}", value_pos) from None
            clauses.append(FilterClause(field, op, value))
            if i >= len(tokens):
                break
            kind, word, pos = tokens[i]
            if kind != "bare" or word.upper() != "AND":
                raise FilterSyntaxError(f"expected AND, got {word!r}", pos)
            i += 1
        return cls(tuple(clauses))

    def matches(self, event: Event) -> bool:
        return all(clause.matches(event) for clause in self.clauses)

    def apply(self, events: Iterable[Event]) -> list[Event]:
        return [event for event in events if self.matches(event)]


@dataclass(frozen=True)
class ViewFilters:
    """Structured predicates for the interactive views.

    ``factor`` is a (factor_id, minimum performance) pair evaluated against
    the client's ranking; ``min_events`` counts a client's events over the
    input series, so single-event clients drop out at min_events=2.
    """

    time_of_day: str | None = None
    factor: tuple[str, int] | None = None
    min_events: int | None = None
    actions: frozenset[str] | None = None
    employees: frozenset[str] | None = None


def apply_filters(
    events: Iterable[Event],
    predicates: ViewFilters,
    *,
    shifts: Mapping[str, ShiftSchedule] | None = None,
    holidays: HolidayCalendar | None = None,
    rankings: Mapping[str, object] | None = None,
    end_of_shift_minutes: int = 120,
) -> list[Event]:
    """Keep events satisfying every active predicate, preserving order."""
    events = list(events)
    counts: dict[str, int] = {}
    if predicates.min_events is not None:
        for event in events:
            counts[event.client_id] = counts.get(event.client_id, 0) + 1

    out: list[Event] = []
    for event in events:
        if predicates.min_events is not None and counts[event.client_id] < predicates.min_events:
            continue
        if predicates.actions is not None and event.action not in predicates.actions:
            continue
        if predicates.employees is not None and event.employee_id not in predicates.employees:
            continue
        if predicates.time_of_day is not None:
            if holidays is None:
                raise ValueError("time_of_day predicate needs shifts and holidays")
            schedule = shifts.get(event.employee_id) if shifts else None
            cls = classify_time_of_day(event.timestamp, schedule, holidays, end_of_shift_minutes)
            if cls != predicates.time_of_day:
                continue
        if predicates.factor is not None:
            if rankings is None:
                raise ValueError("factor predicate needs client rankings")
            factor_id, minimum = predicates.factor
            ranking = rankings.get(event.client_id)
            if ranking is None:
                continue
            performance = {s.factor_id: s.performance for s in ranking.factor_scores}.get(factor_id)
            if performance is None or performance < minimum:
                continue
        out.append(event)
    return out
