"""Rank-structured routing grid laid out along the start-finish great circle.

Interior ranks sit at equal along-track fractions of the great circle; each rank
holds the same number of nodes, spaced ``node_spacing`` apart across the track
and centred on it. The start and finish points are single-node virtual ranks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .geo import (
    GeoPoint,
    destination_point,
    great_circle_intermediate,
    haversine_distance,
    initial_bearing,
)

MIN_NODE_SPACING_NM = 1.0
MAX_ABS_LAT = 85.0


class GridTooSmall(ValueError):
    """The route is too short for the requested node spacing."""


class PoleProximity(ValueError):
    """A grid node falls too close to a pole."""


@dataclass(frozen=True)
class GridSpec:
    start: GeoPoint
    finish: GeoPoint
    node_spacing: float

    def __post_init__(self) -> None:
        if not self.node_spacing >= MIN_NODE_SPACING_NM:
            raise ValueError(
                f"node_spacing must be >= {MIN_NODE_SPACING_NM} nm, got {self.node_spacing}"
            )
        if self.start == self.finish:
            raise ValueError("start and finish must differ")


@dataclass(frozen=True)
class RoutingGrid:
    """Square lattice of ``n`` interior ranks by ``n`` nodes per rank.

    Node indices are ``(rank, position)``. Rank 0 is the start node, ranks
    ``1..n`` are interior and rank ``n + 1`` is the finish node; both virtual
    ranks have the single position 0. Positions within an interior rank run
    from port (negative cross-track offset) to starboard.
    """

    spec: GridSpec
    ranks: tuple[tuple[GeoPoint, ...], ...]
    anchors: tuple[GeoPoint, ...]
    offsets: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.ranks)

    @property
    def start_node(self) -> GeoPoint:
        return self.spec.start

    @property
    def finish_node(self) -> GeoPoint:
        return self.spec.finish

    @property
    def finish_rank(self) -> int:
        return self.n + 1

    def layers(self) -> list[tuple[GeoPoint, ...]]:
        """All ranks including the virtual start and finish ranks."""
        return [(self.spec.start,), *self.ranks, (self.spec.finish,)]

    def node(self, index: tuple[int, int]) -> GeoPoint:
        rank, pos = index
        layers = self.layers()
        if not 0 <= rank < len(layers) or not 0 <= pos < len(layers[rank]):
            raise IndexError(f"no node {index} in grid")
        return layers[rank][pos]

    @property
    def node_count(self) -> int:
        return self.n * self.n + 2


def rank_count(distance: float, node_spacing: float) -> int:
    # along-track spacing D / (n + 1) must not exceed node_spacing; the small
    # slack keeps exact multiples (100 / 25) from tipping over on round-off
    return math.ceil(distance / node_spacing - 1e-9) - 1


def cross_track_offsets(n: int, node_spacing: float) -> list[float]:
    if n % 2:
        half = (n - 1) // 2
        return [m * node_spacing for m in range(-half, half + 1)]
    return [(m + 0.5) * node_spacing for m in range(-n // 2, n // 2)]


def build_grid(spec: GridSpec) -> RoutingGrid:
    """Lay out the square routing grid for `spec`.

    Raises
    ------
    GridTooSmall
        If fewer than one interior rank fits between start and finish.
    PoleProximity
        If any node lies above 85 degrees of latitude.
    """
    distance = haversine_distance(spec.start, spec.finish)
    n = rank_count(distance, spec.node_spacing)
    if n < 1:
        raise GridTooSmall(
            f"route of {distance:.3f} nm admits no interior rank at spacing {spec.node_spacing} nm"
        )
    offsets = cross_track_offsets(n, spec.node_spacing)
    anchors = []
    ranks = []
    for k in range(1, n + 1):
        anchor = great_circle_intermediate(spec.start, spec.finish, k / (n + 1))
        along = initial_bearing(anchor, spec.finish)
        rank = []
        for off in offsets:
            if off >= 0.0:
                p = destination_point(anchor, (along + 90.0) % 360.0, off)
            else:
                p = destination_point(anchor, (along - 90.0) % 360.0, -off)
            if abs(p.lat) > MAX_ABS_LAT:
                raise PoleProximity(f"grid node {p} lies beyond {MAX_ABS_LAT} deg latitude")
            rank.append(p)
        anchors.append(anchor)
        ranks.append(tuple(rank))
    for p in (spec.start, spec.finish):
        if abs(p.lat) > MAX_ABS_LAT:
            raise PoleProximity(f"endpoint {p} lies beyond {MAX_ABS_LAT} deg latitude")
    return RoutingGrid(spec=spec, ranks=tuple(ranks), anchors=tuple(anchors), offsets=tuple(offsets))


def successors(grid: RoutingGrid, node_index: tuple[int, int]) -> list[tuple[int, int]]:
    """Indices of every node reachable in one step from `node_index`."""
    rank, pos = node_index
    grid.node(node_index)
    if rank == grid.finish_rank:
        return []
    if rank == grid.n:
        return [(grid.finish_rank, 0)]
    return [(rank + 1, j) for j in range(grid.n)]


def write_grid_csv(grid: RoutingGrid, path: str | Path) -> None:
    """Dump node coordinates as ``rank,position,lat,lon`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "position", "lat", "lon"])
        for k, layer in enumerate(grid.layers()):
            for j, p in enumerate(layer):
                w.writerow([k, j, repr(p.lat), repr(p.lon)])
