import numpy as np
import pytest

from voyageuq import (
    EnvironmentField,
    GeoPoint,
    PerformanceModel,
    PolarTable,
    constant_field,
    destination_point,
)

# speed peaks on the beam at 5 kn; 0-30 deg off the wind is a no-go zone
BEAM_TWA = [0.0, 30.0, 45.0, 60.0, 90.0, 120.0, 150.0, 180.0]
BEAM_ROW = [0.0, 0.0, 3.5, 4.5, 5.0, 4.8, 4.0, 3.2]
BEAM_TWS = [0.0, 5.0, 10.0, 20.0]


@pytest.fixture
def beam_polar():
    return PolarTable(BEAM_TWS, BEAM_TWA, np.outer(BEAM_ROW, np.ones(len(BEAM_TWS))))


@pytest.fixture
def beam_model(beam_polar):
    return PerformanceModel(beam_polar)


@pytest.fixture
def equator_route():
    start = GeoPoint(0.0, 0.0)
    return start, destination_point(start, 90.0, 100.0)


@pytest.fixture
def beam_field():
    # northerly wind: a due-east course sails at 90 deg true wind angle
    return constant_field((-3.0, 3.0), (-3.0, 5.0), wind_u=0.0, wind_v=-10.0,
                          time_axis=np.arange(0.0, 400.0, 3.0))


def rotating_wind_field(hours=240.0, step=3.0):
    """Wind veering and strengthening in time and varying in space."""
    lat = np.linspace(-3.0, 3.0, 7)
    lon = np.linspace(-3.0, 5.0, 9)
    times = np.arange(0.0, hours + step, step)
    tt, la, lo = np.meshgrid(times, lat, lon, indexing="ij")
    direction = np.radians(330.0 + 40.0 * np.sin(2 * np.pi * tt / 60.0) + 5.0 * la)
    speed = 8.0 + 6.0 * np.sin(2 * np.pi * tt / 45.0 + 0.3 * lo) ** 2
    # meteorological "from" direction to (u, v) of the moving air
    u = -speed * np.sin(direction)
    v = -speed * np.cos(direction)
    hs = 0.5 + 1.5 * np.sin(2 * np.pi * tt / 80.0) ** 2
    return EnvironmentField(lat_axis=lat, lon_axis=lon, time_axis=times,
                            layers={"wind_u": u, "wind_v": v, "wave_hs": hs})


def tws_polar():
    """Polar whose speed depends on wind strength as well as angle."""
    twa = [0.0, 35.0, 45.0, 60.0, 90.0, 120.0, 150.0, 180.0]
    tws = [0.0, 4.0, 8.0, 12.0, 16.0, 25.0]
    shape = np.array([0.0, 0.0, 0.55, 0.8, 1.0, 0.95, 0.8, 0.65])
    strength = np.array([0.0, 2.5, 4.5, 6.0, 6.8, 7.2])
    return PolarTable(tws, twa, np.outer(shape, strength))


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        if report.failed or _ACCEPTANCE.get(name) != "FAIL":
            _ACCEPTANCE[name] = "FAIL" if report.failed else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
