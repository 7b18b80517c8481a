"""Engine configuration: factors, auditor rules, schedules, layout style.

One JSON document configures a run. Its canonical serialization feeds the
config digest, which ties rankings and frame manifests to the exact
configuration they were computed under.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .calendars import (
    _WEEKDAY_KEYS,
    ClientProfile,
    HolidayCalendar,
    ShiftSchedule,
    load_holidays,
    load_profiles,
    load_shifts,
)
from .events import ConfigError
from .frames import canonical_digest
from .layouts import DEFAULT_DR, DEFAULT_PERIOD_DAYS, DEFAULT_R0
from .ranking import (
    FACTOR_IDS,
    ActionRules,
    FactorConfig,
    validate_factor_configs,
)


def default_factors() -> tuple[FactorConfig, ...]:
    return tuple(FactorConfig(factor_id, rank) for rank, factor_id in enumerate(FACTOR_IDS, start=1))


def _profile_dict(profile: ClientProfile) -> dict:
    return {
        "client_id": profile.client_id,
        "billing_day": profile.billing_day,
        "due_day": profile.due_day,
        "status": profile.status,
    }


def _shift_dict(schedule: ShiftSchedule) -> dict:
    shifts = {}
    for weekday, name in enumerate(_WEEKDAY_KEYS):
        interval = schedule.weekday_hours.get(weekday)
        if interval is None:
            shifts[name] = "off"
        else:
            shifts[name] = [interval[0].strftime("%H:%M"), interval[1].strftime("%H:%M")]
    return {"employee_id": schedule.employee_id, "shifts": shifts}


def _holidays_dict(holidays: HolidayCalendar) -> dict:
    return {
        "dates": sorted(d.isoformat() for d in holidays.holidays),
        "weekend": [_WEEKDAY_KEYS[i] for i in sorted(holidays.weekend_days)],
    }


@dataclass(frozen=True)
class EngineConfig:
    factors: tuple[FactorConfig, ...] = field(default_factory=default_factors)
    action_rules: ActionRules = field(default_factory=ActionRules)
    profiles: Mapping[str, ClientProfile] = field(default_factory=dict)
    shifts: Mapping[str, ShiftSchedule] = field(default_factory=dict)
    holidays: HolidayCalendar = field(default_factory=HolidayCalendar)
    timezone: str | None = None
    employee_mode: str = "max"
    employee_tau: Fraction = Fraction(1)
    period_days: int = DEFAULT_PERIOD_DAYS
    r0: float = DEFAULT_R0
    dr: float = DEFAULT_DR
    delta_days: int = 3
    same_employee_only: bool = False
    color_by: str = "client"
    top_k: int = 10
    page_size: int = 500
    api_token: str | None = None

    def __post_init__(self) -> None:
        validate_factor_configs(self.factors)
        if self.employee_mode not in ("max", "threshold"):
            raise ConfigError(f"employee ranking mode must be max or threshold, got {self.employee_mode!r}")
        if self.period_days < 1:
            raise ConfigError(f"period_days must be positive, got {self.period_days}")
        if self.color_by not in ("client", "employee"):
            raise ConfigError(f"color_by must be client or employee, got {self.color_by!r}")
        if self.page_size < 1 or self.top_k < 1:
            raise ConfigError("page_size and top_k must be positive")

    def with_factors(self, factors: Sequence[FactorConfig]) -> "EngineConfig":
        return replace(self, factors=tuple(factors))

    def to_dict(self) -> dict:
        return {
            "timezone": self.timezone,
            "factors": [
                {
                    "factor_id": cfg.factor_id,
                    "rank_position": cfg.rank_position,
                    "thresholds": dict(sorted(cfg.thresholds.items())),
                    "enabled": cfg.enabled,
                }
                for cfg in self.factors
            ],
            "action_rules": self.action_rules.to_dict(),
            "profiles": [_profile_dict(p) for _, p in sorted(self.profiles.items())],
            "shifts": [_shift_dict(s) for _, s in sorted(self.shifts.items())],
            "holidays": _holidays_dict(self.holidays),
            "employee_ranking": {"mode": self.employee_mode, "tau": str(self.employee_tau)},
            "layout": {
                "period_days": self.period_days,
                "r0": self.r0,
                "dr": self.dr,
                "delta_days": self.delta_days,
                "same_employee_only": self.same_employee_only,
                "color_by": self.color_by,
            },
            "service": {
                "api_token": self.api_token,
                "page_size": self.page_size,
                "top_k": self.top_k,
            },
        }

    def digest(self) -> str:
        return canonical_digest(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "EngineConfig":
        if not isinstance(obj, dict):
            raise ConfigError("configuration must be a JSON object")
        factors_raw = obj.get("factors")
        if factors_raw is None:
            factors = default_factors()
        else:
            factors = tuple(
                FactorConfig(
                    factor_id=str(item["factor_id"]),
                    rank_position=int(item["rank_position"]),
                    thresholds=dict(item.get("thresholds", {})),
                    enabled=bool(item.get("enabled", True)),
                )
                for item in factors_raw
            )
        employee_ranking = obj.get("employee_ranking", {})
        layout = obj.get("layout", {})
        service = obj.get("service", {})
        return cls(
            factors=factors,
            action_rules=ActionRules.from_dict(obj.get("action_rules", {})),
            profiles=load_profiles(obj.get("profiles", [])),
            shifts=load_shifts(obj.get("shifts", [])),
            holidays=load_holidays(obj.get("holidays", {})),
            timezone=obj.get("timezone"),
            employee_mode=employee_ranking.get("mode", "max"),
            employee_tau=Fraction(str(employee_ranking.get("tau", "1"))),
            period_days=int(layout.get("period_days", DEFAULT_PERIOD_DAYS)),
            r0=float(layout.get("r0", DEFAULT_R0)),
            dr=float(layout.get("dr", DEFAULT_DR)),
            delta_days=int(layout.get("delta_days", 3)),
            same_employee_only=bool(layout.get("same_employee_only", False)),
            color_by=str(layout.get("color_by", "client")),
            top_k=int(service.get("top_k", 10)),
            page_size=int(service.get("page_size", 500)),
            api_token=service.get("api_token"),
        )


def load_config(path: str | Path) -> EngineConfig:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return EngineConfig.from_dict(payload)


def default_config() -> EngineConfig:
    return EngineConfig()
