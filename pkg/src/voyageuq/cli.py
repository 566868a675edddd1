"""Command-line entry points: ``route``, ``gci`` and ``sweep``.

Configuration is a flat JSON or TOML file; relative paths inside it resolve
against the file's directory. ``VOYAGEUQ_CONFIG`` names the default file.

Keys
----
start, finish          [lat, lon] in degrees
polar                  polar CSV path
environment            environment manifest path
output_dir             where result files go (default ``out``)
wave_coeff             speed loss per metre of wave height (default 0.05)
heading_step           heading scan step in degrees (default 1)
gci_safety_factor      default 1.25
dn                     node spacing for ``route`` (nm)
dn_list                node spacings for ``gci`` and ``sweep``
depart                 departure time, ISO-8601
start_times            list of ISO-8601 departure times
window_start, window_end, cadence_hours
                       alternative to start_times
unc_min, unc_max, unc_steps
                       performance levels in percent (default 50, 150, 21)
workers                worker processes for ``sweep`` (default 1)

Exit status is 0 on success, 1 on any error and 2 when no feasible route
exists.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .env import FormatError, OutOfDomain, format_time, load_environment, parse_time
from .gci import (
    DEFAULT_SAFETY_FACTOR,
    batch_convergence,
    read_batch_csv,
    summary_dict,
    write_batch_csv,
    write_report_csv,
    write_summary_json,
)
from .geo import GeoPoint
from .grid import GridSpec, build_grid
from .perf import DEFAULT_HEADING_STEP, DEFAULT_WAVE_COEFF, PerformanceModel, load_polar
from .router import shortest_path
from .sweep import SweepPlan, run_sweep, window_start_times

CONFIG_ENV_VAR = "VOYAGEUQ_CONFIG"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    base_dir: Path
    start: GeoPoint | None = None
    finish: GeoPoint | None = None
    polar: Path | None = None
    environment: Path | None = None
    output_dir: Path = Path("out")
    wave_coeff: float = DEFAULT_WAVE_COEFF
    heading_step: float = DEFAULT_HEADING_STEP
    gci_safety_factor: float = DEFAULT_SAFETY_FACTOR
    dn: float | None = None
    dn_list: list[float] = field(default_factory=list)
    depart: float | None = None
    start_times: list[float] = field(default_factory=list)
    unc_min: float = 50.0
    unc_max: float = 150.0
    unc_steps: int = 21
    workers: int = 1

    def require(self, *keys: str) -> None:
        for key in keys:
            value = getattr(self, key)
            if value is None or value == []:
                raise ConfigError(f"{key}: required for this command")

    def model(self) -> PerformanceModel:
        self.require("polar")
        try:
            polar = load_polar(self.polar)
        except FileNotFoundError:
            raise ConfigError(f"polar: file not found: {self.polar}") from None
        except FormatError as exc:
            raise ConfigError(f"polar: {exc}") from None
        try:
            return PerformanceModel(polar, wave_coeff=self.wave_coeff, heading_step=self.heading_step)
        except ValueError as exc:
            raise ConfigError(f"wave_coeff/heading_step: {exc}") from None

    def field(self):
        self.require("environment")
        try:
            return load_environment(self.environment)
        except FileNotFoundError as exc:
            raise ConfigError(f"environment: file not found: {exc.filename or self.environment}") from None
        except ValueError as exc:
            raise ConfigError(f"environment: {exc}") from None

    def departures(self) -> list[float]:
        if self.start_times:
            return list(self.start_times)
        self.require("depart")
        return [self.depart]


def _read_config_file(path: Path) -> dict[str, Any]:
    try:
        text = path.read_bytes()
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}") from None
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            return tomllib.loads(text.decode())
        return json.loads(text)
    except ValueError as exc:
        raise ConfigError(f"config: cannot parse {path}: {exc}") from None


def _point(key: str, value: Any) -> GeoPoint:
    try:
        lat, lon = value
        return GeoPoint(float(lat), float(lon))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected [lat, lon], got {value!r} ({exc})") from None


def _number(key: str, value: Any) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite")
    return x


def _time(key: str, value: Any) -> float:
    try:
        return parse_time(value)
    except (FormatError, AttributeError):
        raise ConfigError(f"{key}: bad timestamp {value!r}") from None


def build_config(raw: dict[str, Any], base_dir: Path) -> RunConfig:
    """Validate a raw mapping into a :class:`RunConfig`."""
    known = set(RunConfig.__dataclass_fields__) - {"base_dir"} | {"window_start", "window_end", "cadence_hours"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown configuration key")
    cfg = RunConfig(base_dir=base_dir)

    def path(key: str) -> Path | None:
        if raw.get(key) is None:
            return None
        p = Path(raw[key])
        return p if p.is_absolute() else base_dir / p

    if "start" in raw:
        cfg.start = _point("start", raw["start"])
    if "finish" in raw:
        cfg.finish = _point("finish", raw["finish"])
    cfg.polar = path("polar")
    cfg.environment = path("environment")
    cfg.output_dir = path("output_dir") or base_dir / "out"
    for key in ("wave_coeff", "heading_step", "gci_safety_factor", "unc_min", "unc_max"):
        if key in raw:
            setattr(cfg, key, _number(key, raw[key]))
    if cfg.wave_coeff < 0:
        raise ConfigError("wave_coeff: must be non-negative")
    if not 0 < cfg.heading_step <= 90:
        raise ConfigError("heading_step: must lie in (0, 90]")
    if cfg.gci_safety_factor <= 0:
        raise ConfigError("gci_safety_factor: must be positive")
    if "unc_steps" in raw:
        steps = _number("unc_steps", raw["unc_steps"])
        if steps != int(steps) or steps < 1:
            raise ConfigError("unc_steps: must be a positive integer")
        cfg.unc_steps = int(steps)
    if not 0 < cfg.unc_min <= cfg.unc_max:
        raise ConfigError("unc_min/unc_max: need 0 < unc_min <= unc_max")
    if cfg.unc_steps == 1 and cfg.unc_min != cfg.unc_max:
        raise ConfigError("unc_steps: a single step needs unc_min == unc_max")
    if "dn" in raw:
        cfg.dn = _number("dn", raw["dn"])
    if "dn_list" in raw:
        if not isinstance(raw["dn_list"], list):
            raise ConfigError("dn_list: expected a list of numbers")
        cfg.dn_list = [_number("dn_list", d) for d in raw["dn_list"]]
        if any(b <= a for a, b in zip(cfg.dn_list, cfg.dn_list[1:])):
            raise ConfigError("dn_list: must be strictly increasing")
    if cfg.dn is not None and cfg.dn < 1.0:
        raise ConfigError("dn: node spacing must be at least 1 nm")
    if any(d < 1.0 for d in cfg.dn_list):
        raise ConfigError("dn_list: node spacing must be at least 1 nm")
    if "depart" in raw:
        cfg.depart = _time("depart", raw["depart"])
    if "start_times" in raw:
        cfg.start_times = [_time("start_times", t) for t in raw["start_times"]]
    if any(k in raw for k in ("window_start", "window_end", "cadence_hours")):
        for key in ("window_start", "window_end", "cadence_hours"):
            if key not in raw:
                raise ConfigError(f"{key}: required when a start-time window is given")
        cadence = _number("cadence_hours", raw["cadence_hours"])
        if cadence <= 0:
            raise ConfigError("cadence_hours: must be positive")
        first = _time("window_start", raw["window_start"])
        last = _time("window_end", raw["window_end"])
        if last < first:
            raise ConfigError("window_end: precedes window_start")
        cfg.start_times = list(window_start_times(first, last, cadence))
    if "workers" in raw:
        w = _number("workers", raw["workers"])
        if w != int(w) or w < 1:
            raise ConfigError("workers: must be a positive integer")
        cfg.workers = int(w)
    return cfg


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", nargs="?", help=f"config file (default: ${CONFIG_ENV_VAR})")
    common.add_argument("--dn", help="node spacing in nm; comma separated for gci/sweep")
    common.add_argument("--depart", help="departure time, ISO-8601")
    common.add_argument("--unc-min", type=float)
    common.add_argument("--unc-max", type=float)
    common.add_argument("--unc-steps", type=int)
    common.add_argument("--window-start")
    common.add_argument("--window-end")
    common.add_argument("--cadence-hours", type=float)
    common.add_argument("--kw", type=float, help="wave speed-loss coefficient per metre")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="voyageuq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("route", parents=[common], help="solve one minimum-time route")
    g = sub.add_parser("gci", parents=[common], help="grid convergence study")
    g.add_argument("--vt-csv", help="analyse existing start_iso,dn,vt_hours results instead of solving")
    sub.add_parser("sweep", parents=[common], help="performance uncertainty sweep")
    return parser


def _merge_overrides(raw: dict[str, Any], args: argparse.Namespace) -> dict[str, Any]:
    raw = dict(raw)
    if args.dn is not None:
        parts = [p for p in args.dn.split(",") if p.strip()]
        if args.command == "route":
            if len(parts) != 1:
                raise ConfigError("dn: route takes a single node spacing")
            raw["dn"] = parts[0]
        else:
            raw["dn_list"] = parts
    if args.depart is not None:
        raw["depart"] = args.depart
        for key in ("start_times", "window_start", "window_end", "cadence_hours"):
            raw.pop(key, None)
    for opt, key in (("unc_min", "unc_min"), ("unc_max", "unc_max"), ("unc_steps", "unc_steps"),
                     ("window_start", "window_start"), ("window_end", "window_end"),
                     ("cadence_hours", "cadence_hours"), ("kw", "wave_coeff"), ("workers", "workers")):
        value = getattr(args, opt)
        if value is not None:
            raw[key] = value
    if args.out is not None:
        raw["output_dir"] = str(Path(args.out).resolve())
    return raw


def cmd_route(cfg: RunConfig) -> int:
    cfg.require("start", "finish", "dn", "depart")
    model, fld = cfg.model(), cfg.field()
    grid = build_grid(GridSpec(cfg.start, cfg.finish, cfg.dn))
    res = shortest_path(grid, model, fld, cfg.depart)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    res.write_geojson(out / "route.geojson")
    res.write_csv(out / "route.csv")
    if not res.feasible:
        print(f"infeasible: no route from {cfg.start.as_tuple()} departing {format_time(cfg.depart)}")
        return EXIT_INFEASIBLE
    print(f"Vt = {res.voyaging_time:.4f} h  depart {format_time(cfg.depart)}  dn {cfg.dn:g} nm")
    return EXIT_OK


def _triplets(dns: list[float]) -> list[tuple[float, float, float]]:
    if len(dns) < 3:
        raise ConfigError("dn_list: the gci command needs at least three node spacings")
    return [tuple(dns[i:i + 3]) for i in range(len(dns) - 2)]


def cmd_gci(cfg: RunConfig, vt_csv: str | None = None) -> int:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if vt_csv is not None:
        try:
            results = read_batch_csv(vt_csv)
        except FileNotFoundError:
            raise ConfigError(f"--vt-csv: file not found: {vt_csv}") from None
        dns = sorted({dn for _, vals in results for dn in vals})
    else:
        cfg.require("start", "finish", "dn_list")
        dns = list(cfg.dn_list)
        _triplets(dns)
        model, fld = cfg.model(), cfg.field()
        grids = {dn: build_grid(GridSpec(cfg.start, cfg.finish, dn)) for dn in dns}
        results = []
        for t in cfg.departures():
            vals = {}
            for dn in dns:
                res = shortest_path(grids[dn], model, fld, t)
                vals[dn] = res.voyaging_time if res.feasible else math.inf
            results.append((t, vals))
        write_batch_csv(results, out / "gci_vt.csv")
    triplets = _triplets(dns)
    summaries = {}
    for trip in triplets:
        subset = [(t, {dn: vals[dn] for dn in trip if dn in vals}) for t, vals in results]
        entries, summary = batch_convergence(subset, cfg.gci_safety_factor)
        tag = "" if len(triplets) == 1 else "_" + "_".join(f"{d:g}" for d in trip)
        write_report_csv(entries, out / f"gci_report{tag}.csv")
        write_summary_json(summary, out / f"gci_summary{tag}.json")
        summaries[",".join(f"{d:g}" for d in trip)] = summary_dict(summary)
        for e in entries:
            when = format_time(e.start_t)
            if e.report is None:
                print(f"warning: {when} dn {trip}: {e.error}", file=sys.stderr)
            elif not e.report.monotone:
                print(f"warning: {when} dn {trip}: oscillatory convergence (monotone = false)", file=sys.stderr)
            elif not e.report.converged:
                print(f"warning: {when} dn {trip}: not converged (order {e.report.order_p:.3g})", file=sys.stderr)
        if len(entries) == 1 and entries[0].report is not None:
            r = entries[0].report
            print(f"dn {trip}: p = {r.order_p:.4f}  Vt_ext = {r.f_extrapolated:.4f} h  GCI = {r.gci_fine:.6g}")
        else:
            print(f"dn {trip}: converged {summary.converged_fraction:.2%}  mean GCI {summary.mean_gci:.6g}  "
                  f"mean Vt {summary.mean_vt:.4f} h  mean error {summary.mean_error_hours:.4f} h")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    cfg.require("start", "finish", "dn_list", "polar", "environment")
    starts = cfg.departures()
    try:
        plan = SweepPlan(
            start=cfg.start, finish=cfg.finish, dn_list=tuple(cfg.dn_list),
            unc_min=cfg.unc_min, unc_max=cfg.unc_max, unc_steps=cfg.unc_steps,
            start_times=tuple(starts), polar_path=str(cfg.polar), env_path=str(cfg.environment),
            wave_coeff=cfg.wave_coeff, heading_step=cfg.heading_step,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep plan: {exc}") from None
    report = run_sweep(plan, model=cfg.model(), field=cfg.field(), workers=cfg.workers)
    report.write(cfg.output_dir)
    print(f"{'dn':>6} {'unc%':>7} {'n':>4} {'mean Vt':>10} {'std Vt':>9} {'mean norm':>10} {'std norm':>9}")
    for a in report.aggregates:
        print(f"{a.dn:6g} {a.unc:7.2f} {a.n_starts:4d} {a.mean_vt:10.3f} {a.std_vt:9.3f} "
              f"{a.mean_norm:10.5f} {a.std_norm:9.5f}")
    if report.note:
        print(f"note: {report.note}")
    print(f"records: {len(report.records)}  infeasible: {report.infeasible_count()}")
    if report.records and report.infeasible_count() == len(report.records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if cfg_path:
            path = Path(cfg_path).resolve()
            raw, base = _read_config_file(path), path.parent
        else:
            raw, base = {}, Path.cwd()
        cfg = build_config(_merge_overrides(raw, args), base)
        if args.command == "route":
            return cmd_route(cfg)
        if args.command == "gci":
            return cmd_gci(cfg, args.vt_csv)
        return cmd_sweep(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OutOfDomain as exc:
        print(f"error: weather data does not cover the voyage: {exc}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
