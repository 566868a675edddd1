"""Three-grid convergence analysis: observed order, Richardson extrapolation, GCI.

Grids are identified by their representative size ``h`` (the node spacing in
nm); ``f`` is the solution on that grid (voyaging time in hours). Index 1 is
the finest grid.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .env import format_time, parse_time

DEFAULT_SAFETY_FACTOR = 1.25
MIN_REFINEMENT_RATIO = 1.1


class NoConvergence(ArithmeticError):
    """The observed order of convergence could not be determined."""


@dataclass(frozen=True)
class GridTriplet:
    h: tuple[float, float, float]
    f: tuple[float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "f", tuple(float(x) for x in self.f))
        h1, h2, h3 = self.h
        if not h1 < h2 < h3:
            raise ValueError(f"grid sizes must be strictly increasing, got {self.h}")
        if h1 <= 0:
            raise ValueError("grid sizes must be positive")
        if h2 / h1 <= MIN_REFINEMENT_RATIO or h3 / h2 <= MIN_REFINEMENT_RATIO:
            raise ValueError(
                f"refinement ratios {h2 / h1:.4g}, {h3 / h2:.4g} must exceed {MIN_REFINEMENT_RATIO}"
            )

    @classmethod
    def from_mapping(cls, values: Mapping[float, float]) -> "GridTriplet":
        if len(values) != 3:
            raise ValueError(f"need exactly three grid sizes, got {len(values)}")
        hs = sorted(values)
        return cls(h=tuple(hs), f=tuple(values[x] for x in hs))


@dataclass(frozen=True)
class ConvergenceReport:
    order_p: float
    f_extrapolated: float
    gci_fine: float
    converged: bool
    monotone: bool
    status: str = "ok"  # "ok", "oscillatory" or "exact"


def _q(p: float, r21: float, r32: float, s: float) -> float:
    return math.log((r21**p - s) / (r32**p - s))


def observed_order(e21: float, e32: float, r21: float, r32: float, *, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Solve ``p ln r21 = |ln|e32/e21| + q(p)|`` for the observed order ``p``.

    Fixed-point iteration from the constant-ratio estimate is tried first. When
    the ratios differ enough for that iteration to stop contracting, the same
    equation is solved by bracketing.
    """
    s = math.copysign(1.0, e32 / e21)
    lnr = math.log(abs(e32 / e21))
    lr21 = math.log(r21)
    p = abs(lnr) / lr21
    try:
        for _ in range(max_iter):
            p_new = abs(lnr + _q(p, r21, r32, s)) / lr21
            if not math.isfinite(p_new):
                break
            if abs(p_new - p) < tol:
                return p_new
            p = p_new
    except (ValueError, OverflowError, ZeroDivisionError):
        pass

    def residual(p: float) -> float:
        return p * lr21 - abs(lnr + _q(p, r21, r32, s))

    grid = np.geomspace(1e-3, 60.0, 400)
    prev_p, prev_r = None, None
    for x in grid:
        try:
            r = residual(float(x))
        except (ValueError, OverflowError, ZeroDivisionError):
            prev_p = None
            continue
        if r == 0.0:
            return float(x)
        if prev_p is not None and math.isfinite(r) and math.isfinite(prev_r) and r * prev_r < 0:
            return brentq(residual, prev_p, float(x), xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
        prev_p, prev_r = float(x), r
    raise NoConvergence(f"no order of convergence for e21={e21}, e32={e32}, r21={r21}, r32={r32}")


def analyze_convergence(triplet: GridTriplet, safety_factor: float = DEFAULT_SAFETY_FACTOR) -> ConvergenceReport:
    """Order of convergence, extrapolated solution and fine-grid GCI.

    Identical solutions on all three grids are reported as exactly converged
    (order NaN, GCI 0). Oscillatory triplets are still analysed and flagged
    with ``monotone=False``.

    Raises
    ------
    NoConvergence
        If exactly one of the two solution differences is zero, or the order
        equation has no solution.
    """
    (h1, h2, h3), (f1, f2, f3) = triplet.h, triplet.f
    e21 = f2 - f1
    e32 = f3 - f2
    if e21 == 0.0 and e32 == 0.0:
        return ConvergenceReport(math.nan, f1, 0.0, True, True, "exact")
    if e21 == 0.0 or e32 == 0.0:
        raise NoConvergence(f"one solution difference vanishes (e21={e21}, e32={e32})")
    r21 = h2 / h1
    r32 = h3 / h2
    p = observed_order(e21, e32, r21, r32)
    rp = r21**p
    if rp - 1.0 <= 0.0:
        raise NoConvergence(f"order {p} too small to extrapolate")
    f_ext = (rp * f1 - f2) / (rp - 1.0)
    gci = safety_factor * abs((f1 - f2) / f1) / (rp - 1.0)
    monotone = bool(e21 * e32 > 0)
    return ConvergenceReport(
        order_p=p,
        f_extrapolated=f_ext,
        gci_fine=gci,
        converged=p > 1.0,
        monotone=monotone,
        status="ok" if monotone else "oscillatory",
    )


@dataclass
class BatchEntry:
    start_t: float
    values: dict[float, float]
    report: ConvergenceReport | None
    error: str | None = None

    @property
    def accepted(self) -> bool:
        """Usable for the error estimate: converged, monotone and error free."""
        return self.report is not None and self.report.converged and self.report.monotone


@dataclass
class BatchSummary:
    entries: int
    accepted: int
    converged_fraction: float
    mean_gci: float
    mean_vt: float
    mean_error_hours: float


def batch_convergence(
    results: Iterable[tuple[float, Mapping[float, float]]],
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
) -> tuple[list[BatchEntry], BatchSummary]:
    """Analyse one triplet per start time and summarise the accepted ones.

    Failures are recorded on their entry and never abort the batch. The
    summary averages the GCI and the fine-grid voyaging time over accepted
    entries only; ``mean_error_hours`` is their product.
    """
    entries = []
    for start_t, values in results:
        values = {float(k): float(v) for k, v in values.items()}
        try:
            if any(not math.isfinite(v) for v in values.values()):
                raise ValueError("infeasible or non-finite voyaging time")
            report = analyze_convergence(GridTriplet.from_mapping(values), safety_factor)
            entries.append(BatchEntry(start_t, values, report))
        except (ValueError, ArithmeticError) as exc:
            entries.append(BatchEntry(start_t, values, None, f"{type(exc).__name__}: {exc}"))
    good = [e for e in entries if e.accepted]
    if good:
        mean_gci = float(np.mean([e.report.gci_fine for e in good]))
        mean_vt = float(np.mean([e.values[min(e.values)] for e in good]))
    else:
        mean_gci = mean_vt = math.nan
    summary = BatchSummary(
        entries=len(entries),
        accepted=len(good),
        converged_fraction=len(good) / len(entries) if entries else math.nan,
        mean_gci=mean_gci,
        mean_vt=mean_vt,
        mean_error_hours=mean_gci * mean_vt,
    )
    return entries, summary


def read_batch_csv(path: str | Path) -> list[tuple[float, dict[float, float]]]:
    """Group ``start_iso,dn,vt_hours`` rows by start time, in file order."""
    grouped: dict[float, dict[float, float]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t = parse_time(row["start_iso"])
            grouped.setdefault(t, {})[float(row["dn"])] = float(row["vt_hours"])
    return list(grouped.items())


def write_batch_csv(results: Sequence[tuple[float, Mapping[float, float]]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["start_iso", "dn", "vt_hours"])
        for t, values in results:
            for dn in sorted(values):
                w.writerow([format_time(t), repr(float(dn)), repr(float(values[dn]))])


def write_report_csv(entries: Sequence[BatchEntry], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["start_iso", "p", "f_ext", "gci", "converged", "monotone", "status"])
        for e in entries:
            r = e.report
            if r is None:
                w.writerow([format_time(e.start_t), "", "", "", False, "", e.error])
            else:
                w.writerow([
                    format_time(e.start_t), repr(r.order_p), repr(r.f_extrapolated),
                    repr(r.gci_fine), r.converged, r.monotone, r.status,
                ])


def summary_dict(summary: BatchSummary) -> dict:
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(summary).items()}


def write_summary_json(summary: BatchSummary, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary_dict(summary), indent=2))
