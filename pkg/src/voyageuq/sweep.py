"""Uncertainty sweeps over grid spacing, performance scaling and start time.

Every ``(start time, node spacing, performance %)`` combination is an
independent routing problem. Records always come back in that canonical
order, whatever worker pool produced them.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .env import EnvironmentField, OutOfDomain, format_time, load_environment, parse_time
from .geo import GeoPoint
from .grid import GridSpec, RoutingGrid, build_grid
from .perf import DEFAULT_HEADING_STEP, DEFAULT_WAVE_COEFF, PerformanceModel, load_polar, scale_performance
from .router import shortest_path

BASELINE_UNC = 100.0


class EmptyAggregate(ValueError):
    """No start time is feasible at every performance level."""


@dataclass(frozen=True)
class SweepPlan:
    start: GeoPoint
    finish: GeoPoint
    dn_list: tuple[float, ...]
    unc_min: float
    unc_max: float
    unc_steps: int
    start_times: tuple[float, ...]
    polar_path: str | None = None
    env_path: str | None = None
    wave_coeff: float = DEFAULT_WAVE_COEFF
    heading_step: float = DEFAULT_HEADING_STEP

    def __post_init__(self) -> None:
        object.__setattr__(self, "dn_list", tuple(float(d) for d in self.dn_list))
        object.__setattr__(self, "start_times", tuple(float(t) for t in self.start_times))
        if not self.dn_list:
            raise ValueError("dn_list must not be empty")
        if any(b <= a for a, b in zip(self.dn_list, self.dn_list[1:])):
            raise ValueError(f"dn_list must be strictly increasing, got {self.dn_list}")
        if int(self.unc_steps) != self.unc_steps or self.unc_steps < 1:
            raise ValueError(f"unc_steps must be a positive integer, got {self.unc_steps}")
        if self.unc_steps == 1 and self.unc_min != self.unc_max:
            raise ValueError("a single performance step needs unc_min == unc_max")
        if not 0 < self.unc_min <= self.unc_max:
            raise ValueError(f"need 0 < unc_min <= unc_max, got {self.unc_min}, {self.unc_max}")
        if not self.start_times:
            raise ValueError("start_times must not be empty")

    @property
    def unc_values(self) -> tuple[float, ...]:
        return tuple(float(u) for u in np.linspace(self.unc_min, self.unc_max, int(self.unc_steps)))


def window_start_times(first: float, last: float, cadence_hours: float) -> tuple[float, ...]:
    """Start times from `first` to `last` inclusive every `cadence_hours`."""
    if cadence_hours <= 0:
        raise ValueError("cadence_hours must be positive")
    if last < first:
        raise ValueError("window end precedes its start")
    n = int(math.floor((last - first) / cadence_hours + 1e-9)) + 1
    return tuple(first + k * cadence_hours for k in range(n))


@dataclass(frozen=True)
class SweepRecord:
    start_t: float
    dn: float
    unc: float
    vt: float
    feasible: bool
    reason: str = ""


@dataclass(frozen=True)
class UncAggregate:
    dn: float
    unc: float
    n_starts: int
    n_infeasible: int
    mean_vt: float
    std_vt: float
    mean_norm: float
    std_norm: float


@dataclass(frozen=True)
class Asymmetry:
    """Slow-down penalty minus speed-up gain for a symmetric +/- x % pair."""

    dn: float
    variation: float
    penalty_hours: float
    gain_hours: float
    asymmetry_hours: float
    asymmetry_norm: float


@dataclass
class SweepReport:
    records: list[SweepRecord]
    aggregates: list[UncAggregate]
    asymmetry: list[Asymmetry]
    baseline: dict[tuple[float, float], float]
    note: str = ""

    def infeasible_count(self) -> int:
        return sum(not r.feasible for r in self.records)

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        """Write records CSV, aggregates CSV and summary JSON into `out_dir`."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "records": out / "sweep_records.csv",
            "aggregates": out / "sweep_aggregates.csv",
            "summary": out / "sweep_summary.json",
        }
        with open(paths["records"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["start_iso", "dn", "unc", "vt_hours", "feasible", "reason"])
            for r in self.records:
                w.writerow([format_time(r.start_t), repr(r.dn), repr(r.unc),
                            repr(r.vt) if r.feasible else "", r.feasible, r.reason])
        with open(paths["aggregates"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(UncAggregate.__dataclass_fields__))
            for a in self.aggregates:
                w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(a).values()])
        summary = {
            "records": len(self.records),
            "infeasible_records": self.infeasible_count(),
            "asymmetry": [asdict(a) for a in self.asymmetry],
            "note": self.note,
        }
        paths["summary"].write_text(json.dumps(_jsonable(summary), indent=2))
        return paths


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(v) for v in obj]
    return obj


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-9)


def aggregate(
    records: Sequence[SweepRecord],
    baseline: Mapping[tuple[float, float], float] | None = None,
) -> tuple[list[UncAggregate], list[Asymmetry]]:
    """Per-(spacing, performance) statistics over paired-feasible start times.

    A start takes part for a given spacing only if it is feasible at every
    performance level and at the 100 % baseline. Normalised voyaging time is
    ``vt / vt_baseline`` for the same start and spacing. Standard deviations
    are population values.

    Raises
    ------
    EmptyAggregate
        If no start qualifies for any spacing.
    """
    if not records:
        raise EmptyAggregate("no records to aggregate")
    if baseline is None:
        baseline = {(r.start_t, r.dn): r.vt for r in records if _same(r.unc, BASELINE_UNC) and r.feasible}
    dns = sorted({r.dn for r in records})
    uncs = sorted({r.unc for r in records})
    aggs: list[UncAggregate] = []
    asym: list[Asymmetry] = []
    for dn in dns:
        rows = [r for r in records if r.dn == dn]
        starts = sorted({r.start_t for r in rows})
        paired = [
            t for t in starts
            if (t, dn) in baseline and math.isfinite(baseline[(t, dn)])
            and all(r.feasible for r in rows if r.start_t == t)
            and len([r for r in rows if r.start_t == t]) == len(uncs)
        ]
        if not paired:
            continue
        table = {(r.start_t, r.unc): r.vt for r in rows}
        base = np.array([baseline[(t, dn)] for t in paired])
        by_unc = {}
        for u in uncs:
            vt = np.array([table[(t, u)] for t in paired])
            norm = vt / base
            by_unc[u] = vt
            aggs.append(UncAggregate(
                dn=dn, unc=u, n_starts=len(paired),
                n_infeasible=sum(not r.feasible for r in rows if r.unc == u),
                mean_vt=float(vt.mean()), std_vt=float(vt.std()),
                mean_norm=float(norm.mean()), std_norm=float(norm.std()),
            ))
        ref = float(base.mean())
        for u in uncs:
            if u >= BASELINE_UNC:
                continue
            x = BASELINE_UNC - u
            up = [v for v in uncs if _same(v, BASELINE_UNC + x)]
            if not up:
                continue
            penalty = abs(float(by_unc[u].mean()) - ref)
            gain = abs(float(by_unc[up[0]].mean()) - ref)
            asym.append(Asymmetry(
                dn=dn, variation=x, penalty_hours=penalty, gain_hours=gain,
                asymmetry_hours=penalty - gain, asymmetry_norm=(penalty - gain) / ref,
            ))
    if not aggs:
        raise EmptyAggregate("no start time is feasible at every performance level")
    asym.sort(key=lambda a: (a.dn, a.variation))
    return aggs, asym


# worker-side state, filled once per process
_STATE: dict = {}


def _init_worker(grids: Mapping[float, RoutingGrid], model: PerformanceModel, field: EnvironmentField) -> None:
    _STATE["grids"] = grids
    _STATE["model"] = model
    _STATE["field"] = field


def _solve(task: tuple[float, float, float]) -> SweepRecord:
    start_t, dn, unc = task
    model = scale_performance(_STATE["model"], unc)
    try:
        res = shortest_path(_STATE["grids"][dn], model, _STATE["field"], start_t)
    except OutOfDomain as exc:
        return SweepRecord(start_t, dn, unc, math.inf, False, f"OutOfDomain: {exc}")
    if not res.feasible:
        return SweepRecord(start_t, dn, unc, math.inf, False, "no feasible route")
    return SweepRecord(start_t, dn, unc, res.voyaging_time, True)


def _run_tasks(tasks: list[tuple[float, float, float]], workers: int, state: tuple) -> list[SweepRecord]:
    if workers <= 1:
        _init_worker(*state)
        return [_solve(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=state) as pool:
        return list(pool.map(_solve, tasks, chunksize=chunk))


def run_sweep(
    plan: SweepPlan,
    *,
    model: PerformanceModel | None = None,
    field: EnvironmentField | None = None,
    workers: int = 1,
) -> SweepReport:
    """Solve every (start, spacing, performance) combination of `plan`.

    `model` and `field` default to loading ``plan.polar_path`` and
    ``plan.env_path``. When 100 % is not one of the plan's performance levels
    the baseline solves needed for normalisation are run as well; they are not
    part of ``records``.

    Raises
    ------
    OutOfDomain
        If a start time lies outside the weather data (checked before any solve).
    GridTooSmall, PoleProximity
        If a grid cannot be built.
    """
    if model is None:
        if plan.polar_path is None:
            raise ValueError("plan has no polar_path and no model was given")
        model = PerformanceModel(load_polar(plan.polar_path), wave_coeff=plan.wave_coeff,
                                 heading_step=plan.heading_step)
    if field is None:
        if plan.env_path is None:
            raise ValueError("plan has no env_path and no field was given")
        field = load_environment(plan.env_path)
    for t in plan.start_times:
        if not field.covers_time(t):
            raise OutOfDomain(f"start time {format_time(t)} outside the weather data")
    grids = {dn: build_grid(GridSpec(plan.start, plan.finish, dn)) for dn in plan.dn_list}
    uncs = plan.unc_values
    tasks = [(t, dn, u) for t in plan.start_times for dn in plan.dn_list for u in uncs]
    extra = []
    if not any(_same(u, BASELINE_UNC) for u in uncs):
        extra = [(t, dn, BASELINE_UNC) for t in plan.start_times for dn in plan.dn_list]
    results = _run_tasks(tasks + extra, workers, (grids, model, field))
    records = sorted(results[: len(tasks)], key=lambda r: (r.start_t, r.dn, r.unc))
    base_records = results[len(tasks):] if extra else [r for r in records if _same(r.unc, BASELINE_UNC)]
    baseline = {(r.start_t, r.dn): r.vt for r in base_records if r.feasible}
    note = ""
    try:
        aggs, asym = aggregate(records, baseline)
    except EmptyAggregate as exc:
        aggs, asym, note = [], [], str(exc)
    return SweepReport(records=records, aggregates=aggs, asymmetry=asym, baseline=baseline, note=note)


def records_from_rows(rows: Iterable[Mapping[str, str]]) -> list[SweepRecord]:
    """Rebuild records from ``sweep_records.csv`` rows (as read by csv.DictReader)."""
    out = []
    for row in rows:
        feasible = row["feasible"] == "True"
        out.append(SweepRecord(
            start_t=parse_time(row["start_iso"]), dn=float(row["dn"]), unc=float(row["unc"]),
            vt=float(row["vt_hours"]) if feasible else math.inf, feasible=feasible,
            reason=row.get("reason", ""),
        ))
    return out
