import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BEAM_ROW, BEAM_TWA, BEAM_TWS
from voyageuq.env import EnvSample, FormatError, constant_field
from voyageuq.geo import GeoPoint, destination_point
from voyageuq.perf import (
    InvalidScale,
    PerformanceModel,
    PolarTable,
    arc_cost,
    effective_speed_over_ground,
    load_polar,
    polar_speed,
    save_polar,
    scale_performance,
    water_speed,
    wave_factor,
)


def isotropic(speed):
    return PolarTable([0.0, 30.0], [0.0, 180.0], [[speed, speed], [speed, speed]])


def test_polar_nodes_reproduced(beam_polar):
    for i, a in enumerate(BEAM_TWA):
        for j, w in enumerate(BEAM_TWS):
            assert polar_speed(beam_polar, w, a) == beam_polar.speed[i, j]


def test_polar_midpoint_and_clamp():
    p = PolarTable([10.0, 20.0], [0.0, 90.0, 180.0], [[0, 0], [4, 6], [3, 3]])
    assert polar_speed(p, 15.0, 90.0) == 5.0
    assert polar_speed(p, 40.0, 90.0) == 6.0
    assert polar_speed(p, 2.0, 90.0) == 4.0
    assert polar_speed(p, 15.0, 0.0) == 0.0


def test_polar_vectorised(beam_polar):
    twa = np.linspace(0, 180, 37)
    vec = polar_speed(beam_polar, 7.0, twa)
    assert np.array_equal(vec, [polar_speed(beam_polar, 7.0, a) for a in twa])


def test_scale_performance(beam_model):
    assert scale_performance(beam_model, 100).unc_factor == 1.0
    half = scale_performance(beam_model, 50)
    env = EnvSample(10.0, 0.0, 0.0)
    for h in range(0, 360, 7):
        assert water_speed(half, env, h) == 0.5 * water_speed(beam_model, env, h)
    with pytest.raises(InvalidScale):
        scale_performance(beam_model, 0)
    with pytest.raises(InvalidScale):
        scale_performance(beam_model, -5)


def test_sweep_step_size():
    levels = np.linspace(50, 150, 21)
    assert np.allclose(np.diff(levels), 5.0)
    assert levels[10] == 100.0


def test_wave_factor(beam_polar):
    assert wave_factor(PerformanceModel(beam_polar), 0.0) == 1.0
    assert wave_factor(PerformanceModel(beam_polar, wave_coeff=0.1), 2.0) == pytest.approx(0.8)
    assert wave_factor(PerformanceModel(beam_polar, wave_coeff=0.5), 3.0) == 0.0


def test_beam_reach_no_current(beam_model):
    env = EnvSample(10.0, 0.0, 0.0)  # northerly
    sog, hdg = effective_speed_over_ground(beam_model, env, 90.0)
    assert sog == 5.0 and hdg == 90.0


def test_following_current(beam_model):
    env = EnvSample(10.0, 0.0, 0.0, current_u=1.0, current_v=0.0)
    sog, hdg = effective_speed_over_ground(beam_model, env, 90.0)
    assert sog == pytest.approx(6.0, abs=1e-12)
    assert hdg == 90.0


def test_dead_upwind_no_go():
    no_go = PolarTable([0.0, 20.0], [0.0, 44.9, 45.0, 180.0], [[0, 0], [0, 0], [4, 4], [4, 4]])
    m = PerformanceModel(no_go)
    sog, hdg = effective_speed_over_ground(m, EnvSample(10.0, 0.0, 0.0), 0.0)
    assert sog == 0.0 and math.isnan(hdg)


@pytest.mark.parametrize("cu, cv, course", [(0.6, -0.8, 90.0), (-1.2, 0.3, 37.0), (0.4, 0.9, 251.5)])
def test_cross_current_vector_triangle(cu, cv, course):
    # isotropic boat: heading solves V sin(d) = -c_cross, SOG = V cos(d) + c_along
    V = 5.0
    m = PerformanceModel(isotropic(V))
    c = math.radians(course)
    c_along = cu * math.sin(c) + cv * math.cos(c)
    c_cross = cu * math.cos(c) - cv * math.sin(c)
    d = math.asin(-c_cross / V)
    sog, hdg = effective_speed_over_ground(m, EnvSample(10.0, 0.0, 0.0, cu, cv), course)
    assert sog == pytest.approx(V * math.cos(d) + c_along, abs=1e-9)
    assert (hdg - course - math.degrees(d) + 180) % 360 - 180 == pytest.approx(0, abs=1e-8)


def test_current_too_strong_to_stem():
    m = PerformanceModel(isotropic(2.0))
    sog, _ = effective_speed_over_ground(m, EnvSample(10.0, 0.0, 0.0, 0.0, -3.0), 0.0)
    assert sog == 0.0


def test_arc_cost_examples(beam_model, beam_field):
    a = GeoPoint(0.0, 0.0)
    b = destination_point(a, 90.0, 10.0)
    assert arc_cost(beam_model, beam_field, a, b, 0.0) == pytest.approx(2.0, rel=1e-9)
    upwind = destination_point(a, 0.0, 10.0)
    assert arc_cost(beam_model, beam_field, a, upwind, 0.0) == math.inf
    current = constant_field((-3, 3), (-3, 5), wind_u=0.0, wind_v=-10.0, current_u=1.0, current_v=0.0)
    assert arc_cost(beam_model, current, a, b, 0.0) == pytest.approx(10.0 / 6.0, rel=1e-9)


def test_polar_csv_round_trip(tmp_path, beam_polar):
    path = tmp_path / "polar.csv"
    save_polar(beam_polar, path)
    assert path.read_text().startswith("TWA,")
    p = load_polar(path)
    assert np.array_equal(p.speed, beam_polar.speed)
    assert np.array_equal(p.tws_axis, beam_polar.tws_axis)
    assert np.array_equal(p.twa_axis, beam_polar.twa_axis)


def test_polar_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("X,5,10\n0,0,0\n")
    with pytest.raises(FormatError):
        load_polar(bad)
    bad.write_text("TWA,5,10\n0,0\n")
    with pytest.raises(FormatError):
        load_polar(bad)
    bad.write_text("TWA,5,10\n0,0,-1\n90,3,4\n")
    with pytest.raises(FormatError):
        load_polar(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 30), st.floats(0, 359.9), st.floats(0, 6), st.floats(0.05, 3.0), st.floats(0, 359.9))
def test_scaling_linearity(tws, wind_from, hs, k, course):
    polar = PolarTable(BEAM_TWS, BEAM_TWA, np.outer(BEAM_ROW, [0.5, 0.8, 1.0, 1.1]))
    base = PerformanceModel(polar)
    scaled = PerformanceModel(polar, unc_factor=k)
    env = EnvSample(tws, wind_from, hs)
    v1, v2 = water_speed(base, env, course), water_speed(scaled, env, course)
    assert v2 == pytest.approx(k * v1, rel=1e-12, abs=0)
    s1, h1 = effective_speed_over_ground(base, env, course)
    s2, h2 = effective_speed_over_ground(scaled, env, course)
    assert s2 == pytest.approx(k * s1, rel=1e-12, abs=0)
    if v1 > 0:
        assert h1 == h2 == pytest.approx(course % 360, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(0, 359), st.floats(1, 50))
def test_arc_cost_antimonotone(k1, k2, brg, dist):
    polar = PolarTable(BEAM_TWS, BEAM_TWA, np.outer(BEAM_ROW, np.ones(4)))
    field = constant_field((-3, 3), (-3, 5), wind_u=4.0, wind_v=-6.0)
    a = GeoPoint(0.0, 1.0)
    b = destination_point(a, brg, dist)
    lo, hi = sorted((k1, k2))
    c_lo = arc_cost(PerformanceModel(polar, unc_factor=lo), field, a, b, 0.0)
    c_hi = arc_cost(PerformanceModel(polar, unc_factor=hi), field, a, b, 0.0)
    assert c_hi <= c_lo


@given(st.floats(0, 25), st.floats(0, 180), st.floats(-1e-7, 1e-7))
def test_polar_continuous(tws, twa, eps):
    polar = PolarTable(BEAM_TWS, BEAM_TWA, np.outer(BEAM_ROW, [0.5, 0.8, 1.0, 1.1]))
    a = polar_speed(polar, tws, twa)
    b = polar_speed(polar, tws + eps, min(max(twa + eps, 0.0), 180.0))
    assert abs(a - b) < 1e-5
