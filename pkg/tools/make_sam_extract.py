"""Generate the bundled South-America subduction stand-in data.

The files written here are SYNTHETIC. They imitate the layout of a USGS
ComCat CSV export and of a Slab2-style depth-contour file for the Nazca plate
beneath western South America, but every event and every contour vertex comes
from the simple kinematic model below, not from observations:

* a trench polyline following the Peru-Chile trench;
* slab-depth contours obtained by moving the trench eastward by
  ``depth / tan(dip)``, with a dip that varies along strike (shallow under the
  Peruvian and Pampean flat-slab segments, steeper elsewhere);
* hypocenters scattered around the slab surface with Gutenberg-Richter
  magnitudes, some shallow events, a deep cluster and a few malformed rows.

Run ``python3 tools/make_sam_extract.py`` to regenerate; output is deterministic.
"""
from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "reebrecon" / "data"
KM_PER_DEG = 6371.0 * np.pi / 180.0

# (latitude, trench longitude)
TRENCH = np.array([
    (-1.0, -81.0), (-4.0, -81.6), (-6.0, -81.5), (-9.0, -80.2), (-12.0, -78.6),
    (-15.0, -76.5), (-17.0, -73.8), (-18.5, -71.9), (-21.0, -71.3), (-24.0, -71.0),
    (-27.0, -71.5), (-30.0, -72.0), (-33.0, -72.5), (-36.0, -73.4), (-39.0, -74.2),
    (-41.0, -74.6),
])
# (latitude, dip in degrees)
DIP = np.array([
    (-1.0, 24.0), (-4.0, 22.0), (-6.0, 14.0), (-14.0, 13.0), (-16.5, 24.0),
    (-27.0, 26.0), (-29.0, 16.0), (-32.5, 16.0), (-34.5, 27.0), (-41.0, 30.0),
])
# (latitude, relative event density)
DENSITY = np.array([
    (-2.0, 0.0), (-4.0, 0.3), (-6.0, 0.8), (-10.0, 1.0), (-14.0, 0.6), (-15.5, 0.5),
    (-18.0, 1.2), (-24.0, 1.3), (-28.0, 0.9), (-31.0, 1.1), (-33.0, 0.6), (-35.0, 0.1),
    (-37.0, 0.0),
])


def _interp(table: np.ndarray, lat):
    # tables are listed north to south; np.interp needs ascending abscissae
    return np.interp(lat, table[::-1, 0], table[::-1, 1])


def slab_longitude(lat, depth):
    """Longitude of the model slab surface at ``depth`` km below ``lat``."""
    dip = np.deg2rad(_interp(DIP, lat))
    horizontal_km = depth / np.tan(dip)
    return _interp(TRENCH, lat) + horizontal_km / (KM_PER_DEG * np.cos(np.deg2rad(lat)))


def write_contours(path: Path) -> None:
    lats = np.round(np.arange(-2.0, -40.0 - 1e-9, -0.1), 1)
    with path.open("w") as fh:
        fh.write("# SYNTHETIC slab-depth contours (model, not Slab2 data); "
                 "columns lon(0-360),lat,depth(km, negative down)\n")
        for depth in range(60, 301, 20):
            lon = slab_longitude(lats, float(depth)) % 360.0
            for x, y in zip(lon, lats):
                fh.write(f"{x:.4f},{y:.1f},{-depth:.1f}\n")
            fh.write("\n")


def write_catalog(path: Path, n_events: int = 14000, seed: int = 20240501) -> None:
    rng = np.random.default_rng(seed)
    grid = np.linspace(-2.0, -37.0, 3501)
    weight = _interp(DENSITY, grid)
    lat = rng.choice(grid, size=n_events, p=weight / weight.sum())
    lat = lat + rng.uniform(-0.005, 0.005, n_events)

    kind = rng.random(n_events)
    depth = 40.0 + rng.exponential(65.0, n_events)
    depth = np.where(depth > 320.0, 40.0 + rng.uniform(0, 250.0, n_events), depth)
    shallow = kind < 0.18
    depth[shallow] = rng.uniform(5.0, 59.0, shallow.sum())
    deep = (kind > 0.96) & (lat < -20.0) & (lat > -29.0)
    depth[deep] = rng.uniform(520.0, 640.0, deep.sum())

    lon = slab_longitude(lat, np.minimum(depth, 300.0))
    lon[deep] = -63.2 + rng.normal(0.0, 0.25, deep.sum())
    # scatter around the slab surface: ~10 km across strike, a little along
    lon += rng.normal(0.0, 10.0, n_events) / (KM_PER_DEG * np.cos(np.deg2rad(lat)))
    lat += rng.normal(0.0, 4.0, n_events) / KM_PER_DEG

    mag = np.round(3.6 + rng.exponential(1.0 / np.log(10.0), n_events), 1)
    start = dt.datetime(1990, 1, 1, tzinfo=dt.timezone.utc)
    seconds = np.sort(rng.uniform(0, 33 * 365.25 * 86400, n_events))
    malformed = set(rng.choice(n_events, size=9, replace=False).tolist())

    with path.open("w", newline="") as fh:
        fh.write("# SYNTHETIC hypocenter catalog generated by tools/make_sam_extract.py\n")
        fh.write("# Layout follows a USGS ComCat CSV export; values come from a model.\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "latitude", "longitude", "depth", "mag", "magType", "place"])
        for k in range(n_events):
            t = (start + dt.timedelta(seconds=float(seconds[k]))).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"
            row = [t, f"{lat[k]:.4f}", f"{lon[k]:.4f}", f"{depth[k]:.2f}", f"{mag[k]:.1f}",
                   "mb", "synthetic South America"]
            if k in malformed:
                row[[1, 3, 4][k % 3]] = ["", "nan?", "--"][k % 3]
            w.writerow(row)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    write_catalog(OUT / "sam_catalog_synthetic.csv")
    write_contours(OUT / "sam_slab_contours_synthetic.csv")


if __name__ == "__main__":
    main()
