"""Minimum-time sailing routes with numerical-error and performance-uncertainty analysis."""

from .env import (
    AxisMismatch,
    EnvironmentField,
    EnvSample,
    FormatError,
    GapInTime,
    OutOfDomain,
    constant_field,
    load_environment,
    sample,
    save_environment,
)
from .gci import (
    ConvergenceReport,
    GridTriplet,
    NoConvergence,
    analyze_convergence,
    batch_convergence,
)
from .geo import (
    DegenerateGeometry,
    GeoPoint,
    destination_point,
    great_circle_intermediate,
    haversine_distance,
    initial_bearing,
)
from .grid import GridSpec, GridTooSmall, PoleProximity, RoutingGrid, build_grid, successors
from .perf import (
    InvalidScale,
    PerformanceModel,
    PolarTable,
    arc_cost,
    effective_speed_over_ground,
    load_polar,
    polar_speed,
    save_polar,
    scale_performance,
    wave_factor,
)
from .router import RouteResult, shortest_path, solve_layered
from .sweep import EmptyAggregate, SweepPlan, SweepReport, aggregate, run_sweep

__version__ = "0.1.0"
