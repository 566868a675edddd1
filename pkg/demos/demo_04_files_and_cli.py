"""
Files on disk and the command line
==================================

Write a polar CSV and an environment manifest, point a config file at them
and drive the ``route``, ``gci`` and ``sweep`` commands.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from voyageuq import GeoPoint, PolarTable, constant_field, destination_point, save_environment, save_polar
from voyageuq.cli import main

work = Path(tempfile.mkdtemp(prefix="voyageuq-demo-"))

# polar CSV: "TWA" in the corner, TWS across, TWA down
save_polar(PolarTable([0, 5, 10, 20], [0, 30, 45, 60, 90, 120, 150, 180],
                      np.outer([0, 0, 3.5, 4.5, 5, 4.8, 4, 3.2], [1, 1, 1, 1])), work / "polar.csv")
print((work / "polar.csv").read_text())

#%%
# Environment: manifest.json plus one CSV per (layer, time step). A steady
# northerly over the first week of 2021, in 6 h steps.
t0 = 51 * 8766.0  # about 2021-01-01, hours since 1970
field = constant_field((-3, 3), (-3, 5), wind_u=0.0, wind_v=-10.0,
                       time_axis=t0 + np.arange(0.0, 169.0, 6.0))
save_environment(field, work / "env")
manifest = json.loads((work / "env" / "manifest.json").read_text())
print("manifest keys:", sorted(manifest), "| variables:", sorted(manifest["variables"]))
print("first layer files:", sorted(p.name for p in (work / "env").glob("*_0000.csv")))

start = GeoPoint(0.0, 0.0)
finish = destination_point(start, 90.0, 100.0)
config = {
    "start": [start.lat, start.lon], "finish": [finish.lat, finish.lon],
    "polar": "polar.csv", "environment": "env/manifest.json", "output_dir": "out",
    "dn": 5, "dn_list": [5, 10, 25], "depart": "2021-01-01T06:00:00Z",
    "window_start": "2021-01-01T00:00:00Z", "window_end": "2021-01-02T00:00:00Z", "cadence_hours": 12,
    "unc_min": 50, "unc_max": 150, "unc_steps": 5,
}
(work / "config.json").write_text(json.dumps(config, indent=2))

#%%
# Exit status: 0 ok, 1 error, 2 no feasible route
print("route ->", main(["route", str(work / "config.json")]))
print("gci   ->", main(["gci", str(work / "config.json")]))
print("sweep ->", main(["sweep", str(work / "config.json"), "--dn", "10"]))
print(sorted(p.name for p in (work / "out").iterdir()))
