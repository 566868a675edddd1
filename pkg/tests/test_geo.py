import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import R_NM, cosine_law_distance, vector_bearing
from voyageuq.geo import (
    EARTH_RADIUS_NM,
    DegenerateGeometry,
    GeoPoint,
    destination_point,
    great_circle_intermediate,
    haversine_distance,
    initial_bearing,
)

lats = st.floats(-84.0, 84.0)
lons = st.floats(-180.0, 179.999)
points = st.builds(GeoPoint, lats, lons)


def test_longitude_normalised():
    assert GeoPoint(0, 180).lon == -180.0
    assert GeoPoint(0, 190).lon == pytest.approx(-170.0)
    assert GeoPoint(0, -540).lon == -180.0
    with pytest.raises(ValueError):
        GeoPoint(91, 0)


def test_haversine_examples():
    o = GeoPoint(0, 0)
    assert haversine_distance(o, o) == 0.0
    one_degree = EARTH_RADIUS_NM * math.pi / 180
    assert haversine_distance(o, GeoPoint(0, 1)) == pytest.approx(one_degree, rel=1e-12)
    assert one_degree == pytest.approx(60.0405, abs=1e-4)
    assert haversine_distance(o, GeoPoint(0, 1)) == pytest.approx(cosine_law_distance(o, GeoPoint(0, 1)), rel=1e-9)
    assert haversine_distance(o, GeoPoint(0, 180)) == pytest.approx(math.pi * R_NM, rel=1e-12)
    assert math.pi * R_NM == pytest.approx(10807.28, abs=0.01)


def test_bearing_examples():
    o = GeoPoint(0, 0)
    assert initial_bearing(o, GeoPoint(0, 1)) == pytest.approx(90.0, abs=1e-12)
    assert initial_bearing(o, GeoPoint(1, 0)) == pytest.approx(0.0, abs=1e-12)
    a, b = GeoPoint(10, 10), GeoPoint(20, 20)
    assert initial_bearing(a, b) == pytest.approx(vector_bearing(a, b), abs=1e-9)


@pytest.mark.parametrize("b", [GeoPoint(0, 0), GeoPoint(0, -180), GeoPoint(-0.0, 180.0)])
def test_bearing_degenerate(b):
    with pytest.raises(DegenerateGeometry):
        initial_bearing(GeoPoint(0, 0), b)


def test_destination_examples():
    o = GeoPoint(0, 0)
    assert destination_point(o, 90, 0) == o
    d = EARTH_RADIUS_NM * math.pi / 180
    p = destination_point(o, 90, d)
    assert p.lat == pytest.approx(0, abs=1e-12) and p.lon == pytest.approx(1, abs=1e-12)
    p = destination_point(o, 0, d)
    assert p.lat == pytest.approx(1, abs=1e-12) and p.lon == pytest.approx(0, abs=1e-12)


def test_intermediate_examples():
    a, b = GeoPoint(0, 0), GeoPoint(0, 10)
    assert great_circle_intermediate(a, b, 0.0) == a
    assert great_circle_intermediate(a, b, 1.0) == b
    m = great_circle_intermediate(a, b, 0.5)
    assert m.lat == pytest.approx(0, abs=1e-12) and m.lon == pytest.approx(5, abs=1e-12)
    assert haversine_distance(a, m) == pytest.approx(haversine_distance(m, b), rel=1e-12)
    with pytest.raises(DegenerateGeometry):
        great_circle_intermediate(a, GeoPoint(0, 180), 0.5)


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert haversine_distance(a, c) <= haversine_distance(a, b) + haversine_distance(b, c) + 1e-9


@given(points, points)
def test_distance_symmetric_and_matches_cosine_law(a, b):
    d = haversine_distance(a, b)
    assert d == haversine_distance(b, a)
    assert d >= 0
    if d > 50:
        assert d == pytest.approx(cosine_law_distance(a, b), rel=1e-8)


@settings(max_examples=300)
@given(points, st.floats(0, 359.999), st.floats(0.1, 5000))
def test_destination_round_trip(p, brg, d):
    q = destination_point(p, brg, d)
    assert haversine_distance(p, q) == pytest.approx(d, rel=1e-6)


@given(points, points, st.floats(0, 1))
def test_intermediate_on_circle(a, b, f):
    d = haversine_distance(a, b)
    if d < 1.0 or d > math.pi * R_NM - 1.0:
        return
    m = great_circle_intermediate(a, b, f)
    assert haversine_distance(a, m) + haversine_distance(m, b) == pytest.approx(d, rel=1e-6)
    assert haversine_distance(a, m) == pytest.approx(f * d, rel=1e-6, abs=1e-6)


@given(points, points)
def test_bearing_matches_vector_oracle(a, b):
    d = haversine_distance(a, b)
    if d < 1.0 or d > math.pi * R_NM - 1.0:
        return
    diff = (initial_bearing(a, b) - vector_bearing(a, b) + 180) % 360 - 180
    assert abs(diff) < 1e-6
