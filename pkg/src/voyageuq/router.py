"""Time-dependent minimum-time routing over a layered grid.

The grid is a layered DAG with positive arc costs, so a single forward pass in
rank order computes every node's earliest arrival time exactly (given FIFO
arc costs: departing later never arrives earlier).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .env import EnvironmentField, OutOfDomain
from .geo import GeoPoint
from .grid import RoutingGrid
from .perf import PerformanceModel, arc_costs

# expand(rank, index, t) -> costs to every node of rank + 1
ExpandFn = Callable[[int, int, float], Sequence[float]]


@dataclass
class LayeredSolution:
    labels: list[np.ndarray]
    preds: list[np.ndarray]

    def best_path(self) -> list[int]:
        """Node index per layer on the optimal path to the single finish node."""
        last = len(self.labels) - 1
        if not math.isfinite(self.labels[last][0]):
            return []
        path = [0]
        for k in range(last, 0, -1):
            path.append(int(self.preds[k][path[-1]]))
        return path[::-1]


def solve_layered(layer_sizes: Sequence[int], expand: ExpandFn, depart_t: float) -> LayeredSolution:
    """Earliest-arrival labels over a layered graph with full layer-to-layer arcs.

    The first and last layers must each hold a single node. Ties go to the
    lowest predecessor index.
    """
    if layer_sizes[0] != 1 or layer_sizes[-1] != 1:
        raise ValueError("first and last layers must hold exactly one node")
    labels = [np.array([float(depart_t)])]
    preds = [np.array([-1])]
    for k in range(len(layer_sizes) - 1):
        nxt = np.full(layer_sizes[k + 1], np.inf)
        pred = np.full(layer_sizes[k + 1], -1)
        for i, t in enumerate(labels[k]):
            if not math.isfinite(t):
                continue
            cost = np.asarray(expand(k, i, float(t)), dtype=float)
            arrive = t + cost
            better = arrive < nxt
            nxt = np.where(better, arrive, nxt)
            pred = np.where(better, i, pred)
        labels.append(nxt)
        preds.append(pred)
    return LayeredSolution(labels=labels, preds=preds)


@dataclass(frozen=True)
class Waypoint:
    point: GeoPoint
    time: float
    heading: float  # heading sailed on the leg leaving this point; NaN at the finish


@dataclass(frozen=True)
class RouteResult:
    depart_t: float
    feasible: bool
    voyaging_time: float
    path: tuple[Waypoint, ...] = ()
    positions: tuple[int, ...] = ()

    def to_geojson(self) -> dict:
        coords = [[w.point.lon, w.point.lat] for w in self.path]
        return {
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {
                "feasible": self.feasible,
                "depart_hours": self.depart_t,
                "voyaging_time_hours": self.voyaging_time if self.feasible else None,
                "arrival_hours": [w.time for w in self.path],
                "heading_deg": [None if math.isnan(w.heading) else w.heading for w in self.path],
            },
        }

    def write_geojson(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_geojson(), indent=2))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "lat", "lon", "arrival_hours"])
            for k, wp in enumerate(self.path):
                w.writerow([k, repr(wp.point.lat), repr(wp.point.lon), repr(wp.time)])


def shortest_path(
    grid: RoutingGrid,
    model: PerformanceModel,
    field: EnvironmentField,
    depart_t: float,
) -> RouteResult:
    """Minimum-time route across `grid` leaving the start at `depart_t`.

    An unreachable finish gives ``feasible=False`` with an empty path.

    Raises
    ------
    OutOfDomain
        If the start time, or any finite arrival label, falls outside the time
        span of `field`.
    """
    layers = grid.layers()
    headings: dict[tuple[int, int], np.ndarray] = {}

    def expand(k: int, i: int, t: float) -> np.ndarray:
        cost, hdg = arc_costs(model, field, layers[k][i], layers[k + 1], t)
        headings[(k, i)] = hdg
        return cost

    sol = solve_layered([len(layer) for layer in layers], expand, depart_t)
    finish_t = float(sol.labels[-1][0])
    if math.isfinite(finish_t) and not field.covers_time(finish_t):
        raise OutOfDomain(f"arrival at {finish_t} h is beyond the weather data")
    if not math.isfinite(finish_t):
        return RouteResult(depart_t=depart_t, feasible=False, voyaging_time=math.inf)
    positions = sol.best_path()
    path = []
    for k, pos in enumerate(positions):
        hdg = float(headings[(k, pos)][positions[k + 1]]) if k + 1 < len(positions) else math.nan
        path.append(Waypoint(layers[k][pos], float(sol.labels[k][pos]), hdg))
    return RouteResult(
        depart_t=depart_t,
        feasible=True,
        voyaging_time=finish_t - depart_t,
        path=tuple(path),
        positions=tuple(positions),
    )
