"""Gridded wind, wave and current fields and point sampling.

On-disk format
--------------
A JSON manifest::

    {
      "lat_axis": [...], "lon_axis": [...],
      "time_axis": ["1985-01-01T00:00:00Z", ...],
      "variables": {"wind_u": ["wind_u_000.csv", ...], ...}
    }

Each CSV holds one time step of one variable: one row per ``lat_axis`` entry,
one column per ``lon_axis`` entry, plain decimals, no header. Layer paths are
relative to the manifest. Wind and current components are in knots (u
eastward, v northward, direction of travel); ``wave_hs`` is significant wave
height in metres. The current layers may be omitted, in which case they are
zero everywhere.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .geo import GeoPoint

REQUIRED_VARIABLES = ("wind_u", "wind_v", "wave_hs")
OPTIONAL_VARIABLES = ("current_u", "current_v")
VARIABLES = REQUIRED_VARIABLES + OPTIONAL_VARIABLES

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class FormatError(ValueError):
    """Malformed manifest or layer file."""


class AxisMismatch(ValueError):
    """Layer shapes disagree with the declared axes, or a layer is missing."""


class GapInTime(ValueError):
    """The time axis is not uniformly spaced."""


class OutOfDomain(ValueError):
    """A query falls outside the spatial or temporal extent of a field."""


def parse_time(value: str | float | int) -> float:
    """ISO-8601 string (naive means UTC) or plain hours to hours since 1970-01-01."""
    if isinstance(value, (int, float)):
        return float(value)
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise FormatError(f"bad timestamp {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - EPOCH
    seconds = delta.days * 86400 + delta.seconds
    return (seconds + delta.microseconds / 1e6) / 3600.0


def format_time(hours: float) -> str:
    dt = EPOCH + timedelta(microseconds=round(hours * 3.6e9))
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class EnvSample:
    wind_speed: float
    wind_dir_from: float
    wave_hs: float
    current_u: float = 0.0
    current_v: float = 0.0


def _check_axis(name: str, axis: np.ndarray) -> None:
    if axis.ndim != 1 or axis.size < 2:
        raise AxisMismatch(f"{name} must be 1-D with at least two entries")
    if not np.all(np.isfinite(axis)):
        raise FormatError(f"{name} contains non-finite values")
    d = np.diff(axis)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise AxisMismatch(f"{name} must be strictly monotone")


@dataclass(frozen=True, eq=False)
class EnvironmentField:
    """Time series of gridded layers.

    ``layers[name]`` has shape ``(len(time_axis), len(lat_axis), len(lon_axis))``.
    A field with a single time step is treated as time invariant.
    """

    lat_axis: np.ndarray
    lon_axis: np.ndarray
    time_axis: np.ndarray
    layers: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        lat = np.asarray(self.lat_axis, dtype=float)
        lon = np.asarray(self.lon_axis, dtype=float)
        times = np.asarray(self.time_axis, dtype=float)
        _check_axis("lat_axis", lat)
        _check_axis("lon_axis", lon)
        if times.ndim != 1 or times.size < 1:
            raise AxisMismatch("time_axis must be 1-D and non-empty")
        if times.size > 1:
            d = np.diff(times)
            if np.any(d <= 0):
                raise GapInTime("time_axis must be strictly increasing")
            if np.any(np.abs(d - d[0]) > 1e-9 * d[0]):
                raise GapInTime(f"time_axis is not uniformly spaced (steps {np.unique(d)})")
        shape = (times.size, lat.size, lon.size)
        layers = {}
        for name in REQUIRED_VARIABLES:
            if name not in self.layers:
                raise AxisMismatch(f"missing layer {name!r}")
        for name, arr in self.layers.items():
            if name not in VARIABLES:
                raise FormatError(f"unknown variable {name!r}")
            arr = np.asarray(arr, dtype=float)
            if arr.shape != shape:
                raise AxisMismatch(f"layer {name!r} has shape {arr.shape}, axes imply {shape}")
            if not np.all(np.isfinite(arr)):
                raise FormatError(f"layer {name!r} contains non-finite values")
            arr.setflags(write=False)
            layers[name] = arr
        if np.any(layers["wave_hs"] < 0):
            raise FormatError("wave_hs must be non-negative")
        for arr in (lat, lon, times):
            arr.setflags(write=False)
        object.__setattr__(self, "lat_axis", lat)
        object.__setattr__(self, "lon_axis", lon)
        object.__setattr__(self, "time_axis", times)
        object.__setattr__(self, "layers", layers)

    @property
    def time_step(self) -> float:
        if self.time_axis.size < 2:
            return math.inf
        return float(self.time_axis[1] - self.time_axis[0])

    @property
    def time_bounds(self) -> tuple[float, float]:
        """Earliest and latest query time accepted by :func:`sample`."""
        if self.time_axis.size < 2:
            return (-math.inf, math.inf)
        half = 0.5 * self.time_step
        return (float(self.time_axis[0]) - half, float(self.time_axis[-1]) + half)

    def covers_time(self, t: float) -> bool:
        lo, hi = self.time_bounds
        return lo <= t <= hi

    def time_index(self, t: float) -> int:
        """Index of the nearest time step; exact midpoints go to the earlier one."""
        if not self.covers_time(t):
            lo, hi = self.time_bounds
            raise OutOfDomain(f"time {t} h outside field domain [{lo}, {hi}]")
        if self.time_axis.size == 1:
            return 0
        x = (t - self.time_axis[0]) / self.time_step
        return int(min(max(math.ceil(x - 0.5), 0), self.time_axis.size - 1))


def _fractional_index(axis: np.ndarray, x: float) -> float | None:
    if axis[0] < axis[-1]:
        if not axis[0] <= x <= axis[-1]:
            return None
        return float(np.interp(x, axis, np.arange(axis.size, dtype=float)))
    if not axis[-1] <= x <= axis[0]:
        return None
    rev = axis[::-1]
    return float(axis.size - 1 - np.interp(x, rev, np.arange(axis.size, dtype=float)))


def _lon_index(axis: np.ndarray, lon: float) -> float | None:
    for cand in (lon, lon + 360.0, lon - 360.0):
        fi = _fractional_index(axis, cand)
        if fi is not None:
            return fi
    return None


def _bilinear(layer: np.ndarray, fi: float, fj: float) -> float:
    i0 = min(int(math.floor(fi)), layer.shape[0] - 2)
    j0 = min(int(math.floor(fj)), layer.shape[1] - 2)
    wi = fi - i0
    wj = fj - j0
    top = (1.0 - wj) * layer[i0, j0] + wj * layer[i0, j0 + 1]
    bot = (1.0 - wj) * layer[i0 + 1, j0] + wj * layer[i0 + 1, j0 + 1]
    return float((1.0 - wi) * top + wi * bot)


def wind_from_components(u: float, v: float) -> tuple[float, float]:
    """Speed and meteorological direction (where the wind blows from)."""
    speed = math.hypot(u, v)
    if speed == 0.0:
        return 0.0, 0.0
    d = math.degrees(math.atan2(-u, -v)) % 360.0
    return speed, (0.0 if d >= 360.0 else d)


def sample(field: EnvironmentField, p: GeoPoint, t: float) -> EnvSample:
    """Conditions at `p` at time `t` (hours since epoch).

    Each variable is interpolated bilinearly in latitude and longitude on the
    time step nearest to `t`. Wind is interpolated as components.

    Raises
    ------
    OutOfDomain
        If `p` is outside the lat/lon box or `t` is more than half a time step
        beyond either end of the time axis.
    """
    k = field.time_index(t)
    fi = _fractional_index(field.lat_axis, p.lat)
    fj = _lon_index(field.lon_axis, p.lon)
    if fi is None or fj is None:
        raise OutOfDomain(f"position {p} outside field extent")
    vals = {name: _bilinear(arr[k], fi, fj) for name, arr in field.layers.items()}
    speed, direction = wind_from_components(vals["wind_u"], vals["wind_v"])
    return EnvSample(
        wind_speed=speed,
        wind_dir_from=direction,
        wave_hs=max(0.0, vals["wave_hs"]),
        current_u=vals.get("current_u", 0.0),
        current_v=vals.get("current_v", 0.0),
    )


def constant_field(
    lat_range: tuple[float, float],
    lon_range: tuple[float, float],
    *,
    wind_u: float,
    wind_v: float,
    wave_hs: float = 0.0,
    current_u: float | None = None,
    current_v: float | None = None,
    time_axis: Sequence[float] = (0.0,),
) -> EnvironmentField:
    """Spatially and temporally uniform field on a 2x2 lattice."""
    times = np.asarray(time_axis, dtype=float)
    shape = (times.size, 2, 2)
    layers = {
        "wind_u": np.full(shape, float(wind_u)),
        "wind_v": np.full(shape, float(wind_v)),
        "wave_hs": np.full(shape, float(wave_hs)),
    }
    if current_u is not None or current_v is not None:
        layers["current_u"] = np.full(shape, float(current_u or 0.0))
        layers["current_v"] = np.full(shape, float(current_v or 0.0))
    return EnvironmentField(
        lat_axis=np.array(lat_range, dtype=float),
        lon_axis=np.array(lon_range, dtype=float),
        time_axis=times,
        layers=layers,
    )


def _read_layer(path: Path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    except FileNotFoundError:
        raise
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: ragged or empty layer")
    return np.array(rows, dtype=float)


def load_environment(manifest_path: str | Path) -> EnvironmentField:
    """Read a manifest and its CSV layers into a validated field.

    Raises
    ------
    FormatError, AxisMismatch, GapInTime
        On malformed, inconsistent or irregular input.
    """
    manifest_path = Path(manifest_path)
    try:
        meta = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: {exc}") from exc
    for key in ("lat_axis", "lon_axis", "time_axis", "variables"):
        if key not in meta:
            raise FormatError(f"{manifest_path}: missing key {key!r}")
    try:
        lat = np.array(meta["lat_axis"], dtype=float)
        lon = np.array(meta["lon_axis"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{manifest_path}: bad axis: {exc}") from exc
    times = np.array([parse_time(t) for t in meta["time_axis"]], dtype=float)
    variables = meta["variables"]
    if not isinstance(variables, dict):
        raise FormatError(f"{manifest_path}: 'variables' must be an object")
    base = manifest_path.parent
    layers = {}
    for name, files in variables.items():
        if not isinstance(files, list):
            raise FormatError(f"{manifest_path}: variable {name!r} must list layer files")
        if len(files) != times.size:
            raise AxisMismatch(
                f"variable {name!r} has {len(files)} layers for {times.size} time steps"
            )
        stack = [_read_layer(base / f) for f in files]
        shapes = {a.shape for a in stack}
        if shapes != {(lat.size, lon.size)}:
            raise AxisMismatch(
                f"variable {name!r} layer shapes {sorted(shapes)} != ({lat.size}, {lon.size})"
            )
        layers[name] = np.stack(stack)
    return EnvironmentField(lat_axis=lat, lon_axis=lon, time_axis=times, layers=layers)


def save_environment(field: EnvironmentField, directory: str | Path, name: str = "manifest.json") -> Path:
    """Write `field` as a manifest plus CSV layers; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    variables = {}
    for var, arr in field.layers.items():
        files = []
        for k in range(arr.shape[0]):
            fname = f"{var}_{k:04d}.csv"
            with open(directory / fname, "w", newline="") as fh:
                w = csv.writer(fh)
                for row in arr[k]:
                    w.writerow([repr(float(x)) for x in row])
            files.append(fname)
        variables[var] = files
    meta = {
        "lat_axis": [float(x) for x in field.lat_axis],
        "lon_axis": [float(x) for x in field.lon_axis],
        "time_axis": [format_time(t) for t in field.time_axis],
        "variables": variables,
    }
    path = directory / name
    path.write_text(json.dumps(meta, indent=2))
    return path
