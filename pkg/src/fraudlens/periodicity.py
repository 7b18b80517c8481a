"""Proper-period estimation and the least-squares periodicity diagnostic.

The period estimator works on inter-event day gaps: gaps are clustered
within +/-1 day and the dominant cluster's median is the period, provided
the cluster covers at least half the gaps. The least-squares plot maps each
event to the day of its period interval and fits a line; a near-zero slope
with a small error indicates activity pinned to the same day of the month.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from datetime import date

from .events import EventSeries

DEFAULT_MIN_SUPPORT = 0.5
DEFAULT_SLOPE_TOL = 0.1  # days per event index
DEFAULT_RMSE_TOL = 2.0  # days


@dataclass(frozen=True)
class PeriodEstimate:
    period_days: int | None
    support: float | None
    gap_multiset: tuple[int, ...]

    @property
    def found(self) -> bool:
        return self.period_days is not None


@dataclass(frozen=True)
class LeastSquaresFit:
    slope: float
    intercept: float
    rmse: float
    n: int
    points: tuple[tuple[int, float], ...]
    phase_shift: int = 0  # applied to y (mod period) to dodge the month-boundary wrap


def day_gaps(dates: list[date]) -> list[int]:
    """Consecutive gaps, in whole days, between distinct sorted dates."""
    distinct = sorted(set(dates))
    return [(b - a).days for a, b in zip(distinct, distinct[1:])]


def proper_period(
    series: EventSeries,
    *,
    min_support: float = DEFAULT_MIN_SUPPORT,
    tolerance_days: int = 1,
) -> PeriodEstimate:
    """Estimate the dominant recurrence interval of a client's activity.

    Same-day events collapse to one occurrence before gaps are computed.
    Returns no period when fewer than two distinct days exist or when no
    gap cluster reaches ``min_support``.
    """
    gaps = day_gaps(series.distinct_dates())
    if not gaps:
        return PeriodEstimate(None, None, ())
    best_members: list[int] = []
    for center in sorted(set(gaps)):
        members = [g for g in gaps if abs(g - center) <= tolerance_days]
        if len(members) > len(best_members):
            best_members = members
    support = len(best_members) / len(gaps)
    if support < min_support:
        return PeriodEstimate(None, None, tuple(gaps))
    return PeriodEstimate(statistics.median_low(sorted(best_members)), support, tuple(gaps))


def fit_line(points: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Ordinary least squares through the normal equations.

    Returns (slope, intercept, rmse). Requires >= 2 points with non-constant x.
    """
    n = len(points)
    if n < 2:
        raise ValueError("least-squares fit needs at least 2 points")
    sum_x = sum(x for x, _ in points)
    sum_y = sum(y for _, y in points)
    sum_xx = sum(x * x for x, _ in points)
    sum_xy = sum(x * y for x, y in points)
    denom = n * sum_xx - sum_x * sum_x
    if denom == 0:
        raise ValueError("least-squares fit undefined for constant x")
    slope = (n * sum_xy - sum_x * sum_y) / denom
    intercept = (sum_y - slope * sum_x) / n
    sq_err = sum((y - (slope * x + intercept)) ** 2 for x, y in points)
    return slope, intercept, math.sqrt(sq_err / n)


def day_of_period(when: date, period_days: int, origin: date) -> int:
    """1-based day of the period interval containing ``when``.

    The 30/31-day views read the calendar directly (day of month); other
    period lengths count day offsets from ``origin`` modulo the period.
    """
    if period_days in (30, 31):
        return when.day
    return (when - origin).days % period_days + 1


def least_squares_fit(series: EventSeries, period_days: int = 30) -> LeastSquaresFit:
    """Fit event ordinal vs day-of-period, dodging the period-boundary wrap.

    A monthly pattern hugging the day 1 / day 30 boundary shreds a naive
    fit, so the fit is computed for phase shifts {0, period // 2} applied to
    y modulo the period, and the minimum-rmse variant is reported (ties keep
    shift 0). Reported points carry the winning shift.
    """
    if period_days < 1:
        raise ValueError("period_days must be >= 1")
    if len(series.events) < 2:
        raise ValueError("least-squares fit needs at least 2 events")
    origin = series.events[0].date
    raw_days = [day_of_period(e.date, period_days, origin) for e in series.events]

    best: LeastSquaresFit | None = None
    for shift in (0, period_days // 2):
        shifted = [float((d - 1 + shift) % period_days + 1) for d in raw_days]
        points = list(zip(range(1, len(shifted) + 1), shifted))
        slope, intercept, rmse = fit_line([(float(x), y) for x, y in points])
        candidate = LeastSquaresFit(
            slope=slope,
            intercept=intercept,
            rmse=rmse,
            n=len(points),
            points=tuple(points),
            phase_shift=shift,
        )
        if best is None or candidate.rmse < best.rmse:
            best = candidate
    assert best is not None
    return best


def periodic_indicator(
    fit: LeastSquaresFit,
    slope_tol: float = DEFAULT_SLOPE_TOL,
    rmse_tol: float = DEFAULT_RMSE_TOL,
) -> bool:
    """True when the fitted line is near-flat and the points hug it.

    A flat line alone is not enough: with a large error the periodic
    impression is fictional, so both tolerances must hold.
    """
    return abs(fit.slope) <= slope_tol and fit.rmse <= rmse_tol
