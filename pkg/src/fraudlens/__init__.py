"""Occupational-fraud analytics over employee/client event logs.

Parses audit logs into per-client event series, scores six severity factors
with rank-sum weighted aggregation, estimates activity periodicity, lays out
spiral/layered/timeline/stacked-bar views, renders deterministic SVG frames
ordered by rank, and serves everything over a JSON HTTP API.
"""

from .calendars import (
    ClientProfile,
    HolidayCalendar,
    ShiftSchedule,
    classify_time_of_day,
    distance_to_billing,
)
from .config import EngineConfig, default_config, load_config
from .engine import AnalysisEngine, Snapshot
from .events import (
    ConfigError,
    Event,
    EventSeries,
    IngestError,
    IngestReport,
    Window,
    dedupe_daily,
    export_log,
    parse_log,
    parse_timestamp,
)
from .filters import FilterSet, FilterSyntaxError, ViewFilters, apply_filters
from .frames import (
    FrameEntry,
    FrameManifest,
    build_manifest,
    load_visualization,
    order_frames,
    save_visualization,
)
from .layouts import (
    LayeredLayout,
    SectorRegion,
    SpiralLayout,
    StackedBarData,
    TimelineLayout,
    billing_window_region,
    layered_layout,
    radial_cluster_regions,
    spiral_layout,
    stacked_bar,
    timeline_layout,
)
from .periodicity import (
    LeastSquaresFit,
    PeriodEstimate,
    fit_line,
    least_squares_fit,
    periodic_indicator,
    proper_period,
)
from .ranking import (
    ActionRules,
    ClientRanking,
    EmployeeRanking,
    FactorConfig,
    FactorScore,
    evaluate_client,
    rank_all,
    rank_client,
    rank_employee,
    rank_weights,
)
from .store import EventStore
from .svg import render_frame
from .synthetic import SyntheticDataset, generate_case_study

__version__ = "0.1.0"

__all__ = [
    "ActionRules",
    "AnalysisEngine",
    "ClientProfile",
    "ClientRanking",
    "ConfigError",
    "EmployeeRanking",
    "EngineConfig",
    "Event",
    "EventSeries",
    "EventStore",
    "FactorConfig",
    "FactorScore",
    "FilterSet",
    "FilterSyntaxError",
    "FrameEntry",
    "FrameManifest",
    "HolidayCalendar",
    "IngestError",
    "IngestReport",
    "LayeredLayout",
    "LeastSquaresFit",
    "PeriodEstimate",
    "SectorRegion",
    "ShiftSchedule",
    "Snapshot",
    "SpiralLayout",
    "StackedBarData",
    "SyntheticDataset",
    "TimelineLayout",
    "ViewFilters",
    "Window",
    "apply_filters",
    "billing_window_region",
    "build_manifest",
    "classify_time_of_day",
    "dedupe_daily",
    "default_config",
    "distance_to_billing",
    "evaluate_client",
    "export_log",
    "fit_line",
    "generate_case_study",
    "layered_layout",
    "least_squares_fit",
    "load_config",
    "load_visualization",
    "order_frames",
    "parse_log",
    "parse_timestamp",
    "periodic_indicator",
    "proper_period",
    "radial_cluster_regions",
    "rank_all",
    "rank_client",
    "rank_employee",
    "rank_weights",
    "render_frame",
    "save_visualization",
    "spiral_layout",
    "stacked_bar",
    "timeline_layout",
]
