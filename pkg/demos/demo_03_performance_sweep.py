"""
What if the polar is wrong?
===========================

Scale the boat's performance from 50 % to 150 % and see how voyaging time
responds over a range of departures. Slowing down costs more time than the
same speed-up saves.
"""

import numpy as np

from voyageuq import EnvironmentField, GeoPoint, PerformanceModel, PolarTable, destination_point
from voyageuq.sweep import SweepPlan, run_sweep

twa = [0, 35, 45, 60, 90, 120, 150, 180]
tws = [0, 4, 8, 12, 16, 25]
polar = PolarTable(tws, twa, np.outer([0, 0, 0.55, 0.8, 1.0, 0.95, 0.8, 0.65], [0, 2.5, 4.5, 6, 6.8, 7.2]))

lat, lon = np.linspace(-3, 3, 7), np.linspace(-3, 5, 9)
hours = np.arange(0.0, 241.0, 3.0)
tt, la, lo = np.meshgrid(hours, lat, lon, indexing="ij")
wind_from = np.radians(330 + 40 * np.sin(2 * np.pi * tt / 60) + 5 * la)
speed = 8 + 6 * np.sin(2 * np.pi * tt / 45 + 0.3 * lo) ** 2
field = EnvironmentField(lat, lon, hours, {
    "wind_u": -speed * np.sin(wind_from), "wind_v": -speed * np.cos(wind_from),
    "wave_hs": 0.5 + 1.5 * np.sin(2 * np.pi * tt / 80) ** 2,
})

start = GeoPoint(0.0, 0.0)
plan = SweepPlan(
    start=start, finish=destination_point(start, 90.0, 100.0),
    dn_list=(10.0,), unc_min=50, unc_max=150, unc_steps=11,
    start_times=tuple(np.arange(0.0, 121.0, 12.0)),
)
report = run_sweep(plan, model=PerformanceModel(polar), field=field, workers=2)

#%%
# Mean and spread per performance level; "norm" is Vt / Vt(100 %) per start
print(" unc%   mean Vt   std Vt   mean norm  std norm")
for a in report.aggregates:
    print(f"{a.unc:5.0f} {a.mean_vt:9.2f} {a.std_vt:8.2f} {a.mean_norm:10.4f} {a.std_norm:9.4f}")

#%%
# Penalty of -x % against gain of +x %
for a in report.asymmetry:
    print(f"+/-{a.variation:3.0f} %: lose {a.penalty_hours:6.2f} h, gain {a.gain_hours:6.2f} h, "
          f"asymmetry {a.asymmetry_hours:5.2f} h ({100 * a.asymmetry_norm:.1f} % of Vt)")
