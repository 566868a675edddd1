"""Boat performance: polar lookup, uncertainty scaling, waves, currents, arc cost."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .env import EnvironmentField, EnvSample, FormatError, sample
from .geo import GeoPoint, haversine_distance, initial_bearing

DEFAULT_WAVE_COEFF = 0.05
DEFAULT_HEADING_STEP = 1.0
DEFAULT_CMG_TOLERANCE = 0.05
_ROOT_ITERS = 60


class InvalidScale(ValueError):
    """Performance scaling must be a positive percentage."""


@dataclass(frozen=True, eq=False)
class PolarTable:
    """Boat speed in knots, indexed ``speed[twa, tws]``.

    ``twa_axis`` is the unsigned true wind angle in degrees off the bow
    (0 = head to wind); ``tws_axis`` is true wind speed in knots.
    """

    tws_axis: np.ndarray
    twa_axis: np.ndarray
    speed: np.ndarray

    def __post_init__(self) -> None:
        tws = np.asarray(self.tws_axis, dtype=float)
        twa = np.asarray(self.twa_axis, dtype=float)
        spd = np.asarray(self.speed, dtype=float)
        if tws.ndim != 1 or tws.size < 1 or np.any(np.diff(tws) <= 0):
            raise ValueError("tws_axis must be non-empty and strictly increasing")
        if twa.ndim != 1 or twa.size < 1 or np.any(np.diff(twa) <= 0):
            raise ValueError("twa_axis must be non-empty and strictly increasing")
        if twa[0] < 0 or twa[-1] > 180:
            raise ValueError("twa_axis must lie within [0, 180]")
        if spd.shape != (twa.size, tws.size):
            raise ValueError(f"speed shape {spd.shape} != ({twa.size}, {tws.size})")
        if not np.all(np.isfinite(spd)) or np.any(spd < 0):
            raise ValueError("polar speeds must be finite and non-negative")
        for a in (tws, twa, spd):
            a.setflags(write=False)
        object.__setattr__(self, "tws_axis", tws)
        object.__setattr__(self, "twa_axis", twa)
        object.__setattr__(self, "speed", spd)


@dataclass(frozen=True, eq=False)
class PerformanceModel:
    polar: PolarTable
    unc_factor: float = 1.0
    wave_coeff: float = DEFAULT_WAVE_COEFF
    heading_step: float = DEFAULT_HEADING_STEP
    cmg_tolerance: float = DEFAULT_CMG_TOLERANCE

    def __post_init__(self) -> None:
        if not self.unc_factor > 0:
            raise InvalidScale(f"unc_factor must be positive, got {self.unc_factor}")
        if not self.wave_coeff >= 0:
            raise ValueError(f"wave_coeff must be non-negative, got {self.wave_coeff}")
        if not 0 < self.heading_step <= 90:
            raise ValueError(f"heading_step must lie in (0, 90], got {self.heading_step}")


def fold_angle(angle):
    """Map any angle in degrees onto [0, 180] (unsigned offset from 0)."""
    a = np.mod(angle, 360.0)
    return 180.0 - np.abs(a - 180.0)


def _fractional(axis: np.ndarray, x):
    if axis.size == 1:
        return np.zeros_like(np.asarray(x, dtype=float))
    return np.interp(x, axis, np.arange(axis.size, dtype=float))


def polar_speed(polar: PolarTable, tws, twa):
    """Bilinear boat speed lookup; accepts scalars or broadcastable arrays.

    Queries outside either axis are clamped to the nearest edge.
    """
    fi = _fractional(polar.twa_axis, twa)
    fj = _fractional(polar.tws_axis, tws)
    fi, fj = np.broadcast_arrays(fi, fj)
    ni, nj = polar.speed.shape
    i0 = np.minimum(np.floor(fi).astype(int), max(ni - 2, 0))
    j0 = np.minimum(np.floor(fj).astype(int), max(nj - 2, 0))
    wi = fi - i0
    wj = fj - j0
    i1 = np.minimum(i0 + 1, ni - 1)
    j1 = np.minimum(j0 + 1, nj - 1)
    s = polar.speed
    top = (1.0 - wj) * s[i0, j0] + wj * s[i0, j1]
    bot = (1.0 - wj) * s[i1, j0] + wj * s[i1, j1]
    out = np.maximum((1.0 - wi) * top + wi * bot, 0.0)
    return float(out) if out.ndim == 0 else out


def scale_performance(model: PerformanceModel, unc_percent: float) -> PerformanceModel:
    """Return `model` running at `unc_percent` of its original polar speeds."""
    if not unc_percent > 0:
        raise InvalidScale(f"performance scaling must be > 0 %, got {unc_percent}")
    return replace(model, unc_factor=unc_percent / 100.0)


def wave_factor(model: PerformanceModel, hs: float) -> float:
    if hs < 0:
        raise ValueError("significant wave height must be non-negative")
    return max(0.0, 1.0 - model.wave_coeff * hs)


def water_speed(model: PerformanceModel, env: EnvSample, heading):
    """Speed through the water on `heading` (degrees true)."""
    twa = fold_angle(np.asarray(heading, dtype=float) - env.wind_dir_from)
    v = polar_speed(model.polar, env.wind_speed, twa)
    return v * model.unc_factor * wave_factor(model, env.wave_hs)


def _delta_grid(step: float) -> np.ndarray:
    d = np.arange(-180.0, 180.0, step)
    return np.union1d(d, [0.0])


def _sincos(deg):
    """sin and cos of an angle in degrees, exact at multiples of 90."""
    r = np.radians(deg)
    s, c = np.sin(r), np.cos(r)
    q = np.mod(deg, 90.0) == 0.0
    if np.any(q):
        k = np.mod(np.round(np.asarray(deg) / 90.0), 4)
        s = np.where(q, np.choose(k.astype(int), [0.0, 1.0, 0.0, -1.0]), s)
        c = np.where(q, np.choose(k.astype(int), [1.0, 0.0, -1.0, 0.0]), c)
    return s, c


def _refine_roots(fn, lo, hi, f_lo, f_hi, iters=_ROOT_ITERS):
    """Vectorised Illinois regula falsi on brackets with f_lo * f_hi < 0."""
    lo, hi, f_lo, f_hi = (np.array(a, dtype=float) for a in (lo, hi, f_lo, f_hi))
    side = np.zeros(lo.shape, dtype=int)
    x = lo
    for _ in range(iters):
        x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        fx = fn(x)
        if np.all(np.abs(fx) < 1e-13):
            break
        left = np.sign(fx) == np.sign(f_lo)
        # replace the endpoint on fx's side; halve the stale one after a repeat
        f_hi = np.where(left & (side == 1), 0.5 * f_hi, f_hi)
        f_lo = np.where(~left & (side == -1), 0.5 * f_lo, f_lo)
        lo = np.where(left, x, lo)
        f_lo = np.where(left, fx, f_lo)
        hi = np.where(left, hi, x)
        f_hi = np.where(left, f_hi, fx)
        side = np.where(left, 1, -1)
    return x


def speeds_over_ground(
    model: PerformanceModel, env: EnvSample, courses: Sequence[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Best speed made good along each course and the heading that achieves it.

    Headings are scanned at ``model.heading_step`` around each course and the
    cross-course drift (boat plus current) is driven to zero inside every
    bracket where it changes sign. A heading qualifies when it leaves at most
    ``model.cmg_tolerance`` knots of drift and makes positive progress along
    the course. Courses with no qualifying heading return a speed of 0 and a
    NaN heading.
    """
    courses = np.atleast_1d(np.asarray(courses, dtype=float))
    m = courses.size
    sin_c, cos_c = _sincos(courses)
    cu, cv = env.current_u, env.current_v
    c_along = cu * sin_c + cv * cos_c
    c_cross = cu * cos_c - cv * sin_c

    def components(ci, delta):
        v = water_speed(model, env, courses[ci] + delta)
        sd, cd = _sincos(delta)
        return v * cd + c_along[ci], v * sd + c_cross[ci]

    deltas = _delta_grid(model.heading_step)
    k = deltas.size
    ci_grid = np.repeat(np.arange(m), k).reshape(m, k)
    d_grid = np.broadcast_to(deltas, (m, k))
    along, cross = components(ci_grid, d_grid)

    # exact zeros on the scan
    zi, zj = np.nonzero(cross == 0.0)
    cand_ci = [zi]
    cand_delta = [deltas[zj]]
    cand_along = [along[zi, zj]]

    # sign changes between neighbours, wrapping through +-180
    nxt = np.roll(cross, -1, axis=1)
    bi, bj = np.nonzero(np.sign(cross) * np.sign(nxt) < 0)
    if bi.size:
        lo = deltas[bj]
        hi = np.where(bj == k - 1, 180.0, deltas[np.minimum(bj + 1, k - 1)])
        root = _refine_roots(lambda d: components(bi, d)[1], lo, hi, cross[bi, bj], nxt[bi, bj])
        a_root, x_root = components(bi, root)
        ok = np.abs(x_root) <= model.cmg_tolerance
        cand_ci.append(bi[ok])
        cand_delta.append(root[ok])
        cand_along.append(a_root[ok])

    ci = np.concatenate(cand_ci)
    dl = np.concatenate(cand_delta)
    al = np.concatenate(cand_along)
    keep = al > 0.0
    ci, dl, al = ci[keep], dl[keep], al[keep]

    sog = np.zeros(m)
    heading = np.full(m, np.nan)
    if ci.size:
        # fastest first, then smallest deviation from the course
        order = np.lexsort((np.abs(dl), -al, ci))
        first = order[np.unique(ci[order], return_index=True)[1]]
        sog[ci[first]] = al[first]
        heading[ci[first]] = np.mod(courses[ci[first]] + dl[first], 360.0)
    return sog, heading


def effective_speed_over_ground(
    model: PerformanceModel, env: EnvSample, course_bearing: float
) -> tuple[float, float]:
    """Speed over ground along `course_bearing` and the heading sailed.

    Returns ``(0.0, nan)`` when the course cannot be made good.
    """
    sog, heading = speeds_over_ground(model, env, [course_bearing])
    return float(sog[0]), float(heading[0])


def arc_costs(
    model: PerformanceModel,
    field: EnvironmentField,
    origin: GeoPoint,
    targets: Sequence[GeoPoint],
    depart_t: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Travel times (hours) from `origin` to each target, departing at `depart_t`.

    Conditions are sampled once at the origin and departure time. Arcs that
    cannot be sailed cost ``inf``. Also returns the heading sailed per arc.
    """
    env = sample(field, origin, depart_t)
    dist = np.array([haversine_distance(origin, p) for p in targets])
    courses = np.array([initial_bearing(origin, p) for p in targets])
    sog, heading = speeds_over_ground(model, env, courses)
    with np.errstate(divide="ignore"):
        cost = np.where(sog > 0.0, dist / np.where(sog > 0.0, sog, 1.0), np.inf)
    return cost, heading


def arc_cost(
    model: PerformanceModel,
    field: EnvironmentField,
    origin: GeoPoint,
    target: GeoPoint,
    depart_t: float,
) -> float:
    """Travel time in hours along one arc; ``inf`` when it cannot be sailed."""
    cost, _ = arc_costs(model, field, origin, [target], depart_t)
    return float(cost[0])


def load_polar(path: str | Path) -> PolarTable:
    """Read a polar CSV: ``TWA`` corner cell, TWS header row, TWA first column."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows or rows[0][0].strip().upper() != "TWA":
        raise FormatError(f"{path}: first cell must be 'TWA'")
    try:
        tws = [float(c) for c in rows[0][1:]]
        twa = [float(r[0]) for r in rows[1:]]
        speed = [[float(c) for c in r[1:]] for r in rows[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if any(len(r) != len(tws) for r in speed):
        raise FormatError(f"{path}: ragged speed table")
    try:
        return PolarTable(tws_axis=np.array(tws), twa_axis=np.array(twa), speed=np.array(speed))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_polar(polar: PolarTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["TWA"] + [repr(float(x)) for x in polar.tws_axis])
        for a, row in zip(polar.twa_axis, polar.speed):
            w.writerow([repr(float(a))] + [repr(float(x)) for x in row])
