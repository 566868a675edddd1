import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from voyageuq.gci import (
    GridTriplet,
    NoConvergence,
    analyze_convergence,
    batch_convergence,
    read_batch_csv,
    write_batch_csv,
    write_report_csv,
    write_summary_json,
)


def power_law(f_ext, c, p, hs):
    return GridTriplet(tuple(hs), tuple(f_ext + c * h**p for h in hs))


def test_quadratic_series():
    r = analyze_convergence(GridTriplet((1, 2, 4), (101, 104, 116)))
    assert r.order_p == pytest.approx(2.0, abs=1e-12)
    assert r.f_extrapolated == pytest.approx(100.0, abs=1e-10)
    assert r.gci_fine == pytest.approx(1.25 * (3 / 101) / 3, rel=1e-12)
    assert r.gci_fine == pytest.approx(0.012376, abs=1e-6)
    assert r.converged and r.monotone and r.status == "ok"


def test_exact_convergence():
    r = analyze_convergence(GridTriplet((5, 10, 15), (42.0, 42.0, 42.0)))
    assert r.gci_fine == 0.0 and r.converged and math.isnan(r.order_p)
    assert r.status == "exact" and r.f_extrapolated == 42.0


def test_single_zero_delta():
    with pytest.raises(NoConvergence):
        analyze_convergence(GridTriplet((5, 10, 15), (42.0, 42.0, 43.0)))


def test_nonconstant_ratio_series():
    r = analyze_convergence(power_law(100.0, 0.5, 1.5, (5, 10, 15)))
    assert r.order_p == pytest.approx(1.5, rel=1e-6)
    assert r.f_extrapolated == pytest.approx(100.0, rel=1e-6)


@pytest.mark.parametrize("hs", [(5, 10, 15), (10, 15, 20), (15, 20, 40)])
@pytest.mark.parametrize("p", [1.05, 1.7, 2.5, 4.0])
def test_grid_ratio_patterns(hs, p):
    r = analyze_convergence(power_law(250.0, 0.01, p, hs))
    assert r.order_p == pytest.approx(p, rel=1e-6)
    assert r.f_extrapolated == pytest.approx(250.0, rel=1e-6)


def test_triplet_validation():
    with pytest.raises(ValueError):
        GridTriplet((5, 5.2, 15), (1, 2, 3))
    with pytest.raises(ValueError):
        GridTriplet((10, 5, 15), (1, 2, 3))
    with pytest.raises(ValueError):
        GridTriplet.from_mapping({5: 1.0, 10: 2.0})
    t = GridTriplet.from_mapping({15: 3.0, 5: 1.0, 10: 2.0})
    assert t.h == (5.0, 10.0, 15.0) and t.f == (1.0, 2.0, 3.0)


def test_oscillatory_flagged():
    r = analyze_convergence(GridTriplet((1, 2, 4), (100.0, 101.0, 99.5)))
    assert not r.monotone and r.status == "oscillatory"
    assert r.gci_fine >= 0


@settings(max_examples=300, deadline=None)
@given(
    st.floats(10, 1000), st.floats(0.01, 5) | st.floats(-5, -0.01), st.floats(1.05, 4),
    st.floats(1, 10), st.floats(1.2, 3), st.floats(1.2, 3),
)
def test_power_law_exactness(f_ext, c, p, h1, r21, r32):
    hs = (h1, h1 * r21, h1 * r21 * r32)
    # keep the correction resolvable in double precision
    assume(abs(c) * hs[0] ** p > 1e-6 * f_ext and abs(c) * hs[2] ** p < 10 * f_ext)
    r = analyze_convergence(power_law(f_ext, c, p, hs))
    assert r.order_p == pytest.approx(p, rel=1e-6)
    assert r.f_extrapolated == pytest.approx(f_ext, rel=1e-6)


@given(st.floats(1e-3, 1e3))
def test_scale_invariance(k):
    base = GridTriplet((5, 10, 15), (101.0, 103.2, 107.9))
    scaled = GridTriplet(base.h, tuple(k * f for f in base.f))
    a, b = analyze_convergence(base), analyze_convergence(scaled)
    assert b.order_p == pytest.approx(a.order_p, rel=1e-9)
    assert b.f_extrapolated == pytest.approx(k * a.f_extrapolated, rel=1e-9)
    assert b.gci_fine == pytest.approx(a.gci_fine, rel=1e-9)


@given(st.floats(1.2, 3), st.floats(1, 5), st.floats(0.1, 0.9))
def test_constant_ratio_closed_form(r, h1, shrink):
    # any geometric error sequence with e21/e32 = shrink
    hs = (h1, h1 * r, h1 * r * r)
    f = (50.0, 50.0 + shrink, 50.0 + shrink + 1.0)
    rep = analyze_convergence(GridTriplet(hs, f))
    assert rep.order_p == pytest.approx(math.log(1.0 / shrink) / math.log(r), rel=1e-10)


def _batch(n, oscillatory=()):
    rng = np.random.default_rng(11)
    out = []
    for i in range(n):
        vt = rng.uniform(200, 300)
        if i in oscillatory:
            vals = {5.0: vt, 10.0: vt + 1.0, 15.0: vt - 0.5}
        else:
            vals = {h: vt + 0.02 * h**2 for h in (5.0, 10.0, 15.0)}
        out.append((3600.0 * i, vals))
    return out


def test_batch_homogeneous():
    entries, summary = batch_convergence([(0.0, {1: 101, 2: 104, 4: 116})] * 4)
    assert summary.converged_fraction == 1.0
    assert summary.mean_gci == pytest.approx(entries[0].report.gci_fine)


def test_batch_excludes_flagged():
    entries, s = batch_convergence(_batch(10, oscillatory={3}))
    assert s.accepted == 9 and s.converged_fraction == 0.9
    assert not entries[3].accepted
    good = [e for i, e in enumerate(entries) if i != 3]
    assert s.mean_gci == pytest.approx(np.mean([e.report.gci_fine for e in good]), rel=1e-14)
    assert s.mean_vt == pytest.approx(np.mean([e.values[5.0] for e in good]), rel=1e-14)
    assert s.mean_error_hours == s.mean_gci * s.mean_vt


def test_batch_records_failures():
    data = [(0.0, {1: 1.0, 2: 2.0}), (1.0, {1: 1.0, 2: math.inf, 4: 3.0}), (2.0, {1: 101, 2: 104, 4: 116})]
    entries, s = batch_convergence(data)
    assert entries[0].error and entries[1].error and entries[2].error is None
    assert s.accepted == 1 and s.entries == 3


def test_batch_csv_round_trip(tmp_path):
    data = _batch(3)
    write_batch_csv(data, tmp_path / "vt.csv")
    back = read_batch_csv(tmp_path / "vt.csv")
    assert [t for t, _ in back] == [t for t, _ in data]
    assert all(a == b for (_, a), (_, b) in zip(back, data))
    entries, s = batch_convergence(back)
    write_report_csv(entries, tmp_path / "rep.csv")
    write_summary_json(s, tmp_path / "sum.json")
    header = (tmp_path / "rep.csv").read_text().splitlines()[0]
    assert header == "start_iso,p,f_ext,gci,converged,monotone,status"
