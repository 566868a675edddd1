"""
A single minimum-time route
===========================

Build a polar, a small synthetic weather field and a routing grid, then
solve the fastest passage for one departure time.
"""

import numpy as np

from voyageuq import (
    EnvironmentField,
    GeoPoint,
    GridSpec,
    PerformanceModel,
    PolarTable,
    build_grid,
    destination_point,
    haversine_distance,
    shortest_path,
)

# polar: boat speed (kn) by true wind angle (rows) and true wind speed (cols);
# nothing within 35 deg of the wind
twa = [0, 35, 45, 60, 90, 120, 150, 180]
tws = [0, 4, 8, 12, 16, 25]
shape = np.array([0.0, 0.0, 0.55, 0.8, 1.0, 0.95, 0.8, 0.65])
polar = PolarTable(tws, twa, np.outer(shape, [0.0, 2.5, 4.5, 6.0, 6.8, 7.2]))
model = PerformanceModel(polar, wave_coeff=0.05)

#%%
# Weather: a north-easterly that veers and freshens over two days. Layers are
# (time, lat, lon) arrays; wind is stored as u/v of the moving air.
lat = np.linspace(-4, 4, 9)
lon = np.linspace(-2, 6, 9)
hours = np.arange(0.0, 97.0, 3.0)
tt, la, lo = np.meshgrid(hours, lat, lon, indexing="ij")
wind_from = np.radians(40 + 50 * tt / 96 + 3 * la)
speed = 10 + 4 * np.sin(2 * np.pi * tt / 36 + 0.4 * lo)
field = EnvironmentField(
    lat_axis=lat, lon_axis=lon, time_axis=hours,
    layers={
        "wind_u": -speed * np.sin(wind_from),
        "wind_v": -speed * np.cos(wind_from),
        "wave_hs": 1.0 + 0.5 * np.cos(2 * np.pi * tt / 48),
        "current_u": np.full(tt.shape, 0.3),   # weak easterly set
        "current_v": np.zeros(tt.shape),
    },
)

#%%
# A 150 nm passage heading a little north of east, on a 10 nm grid
start = GeoPoint(-1.0, 0.0)
finish = destination_point(start, 75.0, 150.0)
grid = build_grid(GridSpec(start, finish, node_spacing=10.0))
print(f"distance {haversine_distance(start, finish):.1f} nm, {grid.n} ranks x {grid.n} nodes")

route = shortest_path(grid, model, field, depart_t=6.0)
print(f"Vt = {route.voyaging_time:.2f} h (mean {haversine_distance(start, finish) / route.voyaging_time:.2f} kn)")
for wp in route.path:
    hdg = "  --" if np.isnan(wp.heading) else f"{wp.heading:5.1f}"
    print(f"  t={wp.time:7.2f} h  {wp.point.lat:7.3f} {wp.point.lon:7.3f}  heading {hdg}")

#%%
# Leaving later gives a different answer because the weather changes
for t in (0.0, 12.0, 24.0, 36.0):
    print(f"depart +{t:4.0f} h -> Vt {shortest_path(grid, model, field, t).voyaging_time:6.2f} h")
