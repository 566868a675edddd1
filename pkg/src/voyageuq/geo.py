"""Spherical-earth geodesy used by grid construction and arc costing.

All public functions take and return degrees and nautical miles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_NM = 3440.065

# Angular separation (radians) below which two points are treated as coincident
# or antipodal for bearing purposes.
_DEGENERATE_RAD = 1e-12


class DegenerateGeometry(ValueError):
    """Raised when a bearing or great circle is undefined."""


def _normalize_lon(lon: float) -> float:
    lon = math.fmod(lon + 180.0, 360.0)
    if lon < 0.0:
        lon += 360.0
    return lon - 180.0


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude on a sphere, in degrees.

    Longitude is normalised to ``[-180, 180)`` on construction.
    """

    lat: float
    lon: float

    def __post_init__(self) -> None:
        lat = float(self.lat)
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude {lat} outside [-90, 90]")
        lon = float(self.lon)
        if not math.isfinite(lon):
            raise ValueError(f"longitude {lon} is not finite")
        object.__setattr__(self, "lat", lat)
        if not -180.0 <= lon < 180.0:
            lon = _normalize_lon(lon)
        object.__setattr__(self, "lon", lon)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lat, self.lon)


def _central_angle(a: GeoPoint, b: GeoPoint) -> float:
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * math.asin(min(1.0, math.sqrt(h)))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in nautical miles."""
    return EARTH_RADIUS_NM * _central_angle(a, b)


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Forward azimuth of the great circle from `a` to `b`, degrees in [0, 360).

    Raises
    ------
    DegenerateGeometry
        If the points coincide or are antipodal.
    """
    delta = _central_angle(a, b)
    if delta < _DEGENERATE_RAD or math.pi - delta < 1e-9:
        raise DegenerateGeometry(f"bearing undefined between {a} and {b}")
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlon = math.radians(b.lon - a.lon)
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    brg = math.degrees(math.atan2(y, x)) % 360.0
    # -0.0 % 360 and tiny negatives can round up to exactly 360
    return 0.0 if brg >= 360.0 else brg


def destination_point(origin: GeoPoint, bearing: float, distance: float) -> GeoPoint:
    """Point reached after `distance` nm along the great circle leaving at `bearing`."""
    if distance < 0.0:
        raise ValueError("distance must be non-negative")
    if distance == 0.0:
        return origin
    delta = distance / EARTH_RADIUS_NM
    theta = math.radians(bearing)
    lat1, lon1 = math.radians(origin.lat), math.radians(origin.lon)
    sin_lat2 = math.sin(lat1) * math.cos(delta) + math.cos(lat1) * math.sin(delta) * math.cos(theta)
    lat2 = math.asin(max(-1.0, min(1.0, sin_lat2)))
    lon2 = lon1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(lat1),
        math.cos(delta) - math.sin(lat1) * sin_lat2,
    )
    return GeoPoint(math.degrees(lat2), math.degrees(lon2))


def great_circle_intermediate(a: GeoPoint, b: GeoPoint, fraction: float) -> GeoPoint:
    """Spherical linear interpolation between `a` (fraction 0) and `b` (fraction 1)."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    if fraction == 0.0:
        return a
    if fraction == 1.0:
        return b
    delta = _central_angle(a, b)
    if delta < _DEGENERATE_RAD:
        return a
    if math.pi - delta < 1e-9:
        raise DegenerateGeometry("great circle undefined between antipodal points")
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    wa = math.sin((1.0 - fraction) * delta) / math.sin(delta)
    wb = math.sin(fraction * delta) / math.sin(delta)
    x = wa * math.cos(lat1) * math.cos(lon1) + wb * math.cos(lat2) * math.cos(lon2)
    y = wa * math.cos(lat1) * math.sin(lon1) + wb * math.cos(lat2) * math.sin(lon2)
    z = wa * math.sin(lat1) + wb * math.sin(lat2)
    lat = math.atan2(z, math.hypot(x, y))
    lon = math.atan2(y, x)
    return GeoPoint(math.degrees(lat), math.degrees(lon))
