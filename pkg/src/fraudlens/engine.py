"""The analysis engine: one store, one config, one consistent snapshot.

Reads serve from an immutable snapshot (rankings, manifest, digests).
Mutations (ingest, status marks, config changes) are serialized behind a
lock, recompute everything from the full data set, and swap the snapshot in
one assignment, so a failed mutation leaves the previous state intact and
readers never see a half-applied update.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Iterable, Sequence

from .calendars import ClientProfile
from .config import EngineConfig
from .events import Event, EventSeries, Window, dedupe_daily, export_log
from .filters import FilterSet
from .frames import FrameManifest, build_manifest, order_frames, rankings_digest
from .layouts import (
    LayeredLayout,
    StackedBarData,
    billing_window_region,
    layered_layout,
    radial_cluster_regions,
    spiral_layout,
    stacked_bar,
    timeline_layout,
)
from .periodicity import least_squares_fit, periodic_indicator, proper_period
from .ranking import (
    FACTOR_WORKING_HOURS,
    ClientRanking,
    EmployeeRanking,
    rank_all,
)
from .store import EventStore
from .svg import render_frame

# deterministic scaffold window for a store with no events yet
_EMPTY_WINDOW = Window(datetime(2000, 1, 1, 0, 0), datetime(2000, 1, 31, 23, 59))


@dataclass(frozen=True)
class Snapshot:
    window: Window | None
    clients: tuple[ClientRanking, ...]
    employees: tuple[EmployeeRanking, ...]
    manifest: FrameManifest
    config_digest: str
    rankings_digest: str

    def client(self, client_id: str) -> ClientRanking | None:
        for ranking in self.clients:
            if ranking.client_id == client_id:
                return ranking
        return None


class AnalysisEngine:
    def __init__(
        self,
        store: EventStore,
        config: EngineConfig | None = None,
        window: Window | None = None,
    ) -> None:
        self._store = store
        self._config = config or EngineConfig()
        self._window = window
        self._override: list[str] | None = None
        self._lock = threading.Lock()
        self._snapshot = self._compute_snapshot()

    # -- read side -----------------------------------------------------------

    @property
    def store(self) -> EventStore:
        return self._store

    @property
    def config(self) -> EngineConfig:
        return self._config

    @property
    def window(self) -> Window | None:
        return self._window

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def effective_profile(self, client_id: str) -> ClientProfile:
        base = self._config.profiles.get(client_id, ClientProfile(client_id))
        override = self._store.status_overrides().get(client_id)
        return replace(base, status=override) if override else base

    def _effective_profiles(self) -> dict[str, ClientProfile]:
        profiles = dict(self._config.profiles)
        for client_id, status in self._store.status_overrides().items():
            base = profiles.get(client_id, ClientProfile(client_id))
            profiles[client_id] = replace(base, status=status)
        return profiles

    def _known_client(self, client_id: str) -> bool:
        return self._store.has_client(client_id) or client_id in self._config.profiles

    def _end_window_minutes(self) -> int:
        for cfg in self._config.factors:
            if cfg.factor_id == FACTOR_WORKING_HOURS:
                return cfg.threshold("end_of_shift_minutes")
        return 120

    def layout_window(self) -> Window:
        if self._window is not None:
            return self._window
        span = self._store.time_range()
        return Window(*span) if span else _EMPTY_WINDOW

    def client_series(self, client_id: str) -> tuple[EventSeries, EventSeries]:
        """Raw and daily-deduplicated views of one client's events."""
        if not self._known_client(client_id):
            raise KeyError(client_id)
        raw = self._store.events_for_client(client_id, self._window)
        return raw, dedupe_daily(raw)

    def _build_spiral(self, client_id: str):
        raw, dedup = self.client_series(client_id)
        cfg = self._config
        profile = self.effective_profile(client_id)
        regions = []
        billing = billing_window_region(profile, cfg.period_days)
        if billing is not None:
            regions.append(billing)
        regions.extend(
            radial_cluster_regions(
                dedup,
                cfg.delta_days,
                period_days=cfg.period_days,
                same_employee_only=cfg.same_employee_only,
            )
        )
        spiral = spiral_layout(
            dedup.events,
            self.layout_window(),
            cfg.period_days,
            client_id=client_id,
            regions=regions,
            color_by=cfg.color_by,
            r0=cfg.r0,
            dr=cfg.dr,
        )
        return raw, dedup, spiral

    def client_layouts(self, client_id: str) -> dict:
        raw, dedup, spiral = self._build_spiral(client_id)
        cfg = self._config
        timeline = timeline_layout(raw, cfg.shifts, cfg.holidays, self._end_window_minutes())

        estimate = proper_period(dedup)
        fit = None
        if len(dedup.events) >= 2:
            fit = least_squares_fit(dedup, cfg.period_days)
        return {
            "client_id": client_id,
            "spiral": spiral.to_dict(),
            "timeline": timeline.to_dict(),
            "regions": [r.to_dict() for r in spiral.regions],
            "period": {
                "period_days": estimate.period_days,
                "support": estimate.support,
                "gaps": list(estimate.gap_multiset),
            },
            "least_squares": None
            if fit is None
            else {
                "slope": fit.slope,
                "intercept": fit.intercept,
                "rmse": fit.rmse,
                "n": fit.n,
                "phase_shift": fit.phase_shift,
                "periodic": periodic_indicator(fit),
            },
        }

    def layered(self, client_filter: str | None = None) -> LayeredLayout:
        if client_filter is not None and not self._known_client(client_filter):
            raise KeyError(client_filter)
        events = self._store.all_events(self._window)
        return layered_layout(events, self._snapshot.clients, client_filter)

    def stacked(self, top_k: int | None = None) -> StackedBarData:
        return stacked_bar(self._snapshot.clients, top_k or self._config.top_k)

    def frame_svg(self, index: int) -> str:
        manifest = self._snapshot.manifest
        if index < 0 or index >= len(manifest.frames):
            raise IndexError(index)
        entry = manifest.frames[index]
        _, _, spiral = self._build_spiral(entry.client_id)
        profile = self.effective_profile(entry.client_id)
        ranking = self._snapshot.client(entry.client_id)
        annotations = {
            "rank": str(index + 1),
            "score": str(entry.score),
            "status": profile.status,
        }
        if ranking is not None:
            for score in ranking.factor_scores:
                if score.performance or score.skipped:
                    annotations[score.factor_id] = "skipped" if score.skipped else score.severity
        return render_frame(
            entry.client_id,
            spiral,
            annotations,
            billing_day=profile.billing_day,
            due_day=profile.due_day,
        )

    def rank_for_window(self, window: Window | None) -> tuple[list[ClientRanking], list[EmployeeRanking]]:
        """One-off ranking over an auditor-chosen interval; snapshot untouched."""
        cfg = self._config
        return rank_all(
            self._store,
            window,
            cfg.factors,
            self._effective_profiles(),
            cfg.shifts,
            cfg.holidays,
            cfg.action_rules,
            employee_mode=cfg.employee_mode,
            tau=cfg.employee_tau,
        )

    def query(self, expression: str = "", page: int = 0, page_size: int | None = None) -> dict:
        filters = FilterSet.parse(expression)
        events = filters.apply(self._store.all_events(self._window))
        size = page_size or self._config.page_size
        start = page * size
        return {
            "total": len(events),
            "page": page,
            "page_size": size,
            "events": [e.to_record() for e in events[start : start + size]],
        }

    def export(self, destination, expression: str = "", format: str = "csv") -> int:
        filters = FilterSet.parse(expression)
        events = filters.apply(self._store.all_events(self._window))
        return export_log(events, destination, format)

    # -- mutation side ---------------------------------------------------------

    def _compute_snapshot(self) -> Snapshot:
        cfg = self._config
        clients, employees = rank_all(
            self._store,
            self._window,
            cfg.factors,
            self._effective_profiles(),
            cfg.shifts,
            cfg.holidays,
            cfg.action_rules,
            employee_mode=cfg.employee_mode,
            tau=cfg.employee_tau,
        )
        known = {r.client_id for r in clients}
        override = [c for c in self._override or [] if c in known] or None
        manifest = build_manifest(clients, self._window, cfg.digest(), override)
        return Snapshot(
            window=self._window,
            clients=tuple(clients),
            employees=tuple(employees),
            manifest=manifest,
            config_digest=cfg.digest(),
            rankings_digest=rankings_digest(clients, employees),
        )

    def recompute(self) -> Snapshot:
        with self._lock:
            self._snapshot = self._compute_snapshot()
            return self._snapshot

    def ingest(self, events: Iterable[Event]) -> dict:
        events = list(events)
        with self._lock:
            inserted, duplicates = self._store.add_events(events)
            if inserted:
                self._snapshot = self._compute_snapshot()
            manifest = self._snapshot.manifest
            return {
                "accepted": inserted,
                "duplicates": duplicates,
                "manifest_digest": manifest.digest,
                "top": [f.client_id for f in manifest.frames[:10]],
            }

    def set_status(self, client_id: str, status: str, actor: str, at: datetime | None = None) -> ClientRanking | None:
        if not self._known_client(client_id):
            raise KeyError(client_id)
        with self._lock:
            stamp = (at or datetime.now()).replace(second=0, microsecond=0)
            self._store.set_status(client_id, status, actor, stamp)
            self._snapshot = self._compute_snapshot()
            return self._snapshot.client(client_id)

    def update_config(self, config: EngineConfig) -> Snapshot:
        with self._lock:
            previous = self._config
            self._config = config
            try:
                self._snapshot = self._compute_snapshot()
            except Exception:
                self._config = previous
                raise
            return self._snapshot

    def set_window(self, window: Window | None) -> Snapshot:
        with self._lock:
            previous = self._window
            self._window = window
            try:
                self._snapshot = self._compute_snapshot()
            except Exception:
                self._window = previous
                raise
            return self._snapshot

    def set_frame_override(self, override: Sequence[str] | None) -> Snapshot:
        with self._lock:
            if override:
                order_frames(list(self._snapshot.clients), list(override))  # strict validation
            self._override = list(override) if override else None
            self._snapshot = self._compute_snapshot()
            return self._snapshot
