#!/usr/bin/env python3
"""Regenerate data/italy/italy.pgm and print the projected city cells.

The outline is a hand-digitised coarse polygon of mainland Italy (lat, lon),
the mountain patches are ellipses over the main Apennine massifs. Projection
is equirectangular with a cos(42 deg) longitude factor. The scale is chosen
so that the habitable cell count lands near 29578 (14789 particles at 50%
coverage).

Usage: scripts/make_italy_map.py [out_dir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
from matplotlib.path import Path as PolyPath

COASTLINE = [
    (43.79, 7.53), (44.20, 7.00), (45.00, 6.70), (45.80, 6.90), (46.40, 8.30),
    (46.50, 9.30), (46.60, 10.40), (47.00, 11.20), (46.70, 12.40), (46.60, 13.70),
    (46.00, 13.60), (45.60, 13.80), (45.68, 13.38), (45.64, 13.10), (45.50, 12.50),
    (45.40, 12.30), (44.95, 12.50), (44.50, 12.30), (44.03, 12.65), (43.60, 13.50),
    (43.00, 13.85), (42.50, 14.20), (42.00, 14.90), (41.90, 15.20), (41.90, 16.10),
    (41.60, 15.90), (41.30, 16.40), (41.10, 16.90), (40.60, 17.98), (40.30, 18.40),
    (39.80, 18.45), (40.10, 18.00), (40.45, 17.20), (40.20, 16.70), (39.90, 16.60),
    (39.60, 16.90), (39.40, 17.10), (39.00, 17.15), (38.90, 16.60), (38.40, 16.50),
    (37.95, 16.00), (38.05, 15.62), (38.25, 15.62), (38.70, 15.85), (38.95, 16.20),
    (39.40, 16.00), (39.90, 15.75), (40.10, 15.60), (40.30, 14.90), (40.60, 14.40),
    (40.80, 14.20), (41.20, 13.60), (41.45, 12.90), (41.75, 12.25), (42.10, 11.80),
    (42.40, 11.20), (42.90, 10.70), (43.50, 10.30), (43.90, 10.20), (44.10, 9.80),
    (44.30, 9.30), (44.38, 8.92), (44.30, 8.45), (43.90, 8.10),
]

# (lat, lon, lat radius, lon radius)
MOUNTAINS = [
    (44.45, 10.10, 0.20, 0.45),  # Tuscan-Emilian ridge
    (43.10, 12.15, 0.35, 0.20),  # Umbria-Marche
    (42.20, 13.70, 0.35, 0.35),  # Gran Sasso / Majella
    (40.45, 15.30, 0.30, 0.30),  # Lucanian
    (39.30, 16.45, 0.25, 0.20),  # Sila
]

CITIES = [
    ("Genua", 44.43, 8.95),
    ("Placentia", 45.05, 9.69),
    ("Aquileia", 45.77, 13.37),
    ("Bononia", 44.49, 11.34),
    ("Florenzia", 43.77, 11.25),
    ("Ariminum", 43.98, 12.53),
    ("Roma", 41.90, 12.50),
    ("Capua", 41.08, 14.25),
    ("Venusia", 40.96, 15.82),
    ("Brundisium", 40.60, 17.88),
    ("Rhegium", 38.12, 15.70),
]

LON_FACTOR = math.cos(math.radians(42.0))
TARGET_HABITABLE = 29578
MARGIN = 4


def project(lat, lon, scale, lat_max, lon_min):
    return ((lon - lon_min) * LON_FACTOR * scale + MARGIN,
            (lat_max - lat) * scale + MARGIN)


def rasterize(scale):
    lats = [p[0] for p in COASTLINE]
    lons = [p[1] for p in COASTLINE]
    lat_max, lon_min = max(lats), min(lons)
    width = int(math.ceil((max(lons) - lon_min) * LON_FACTOR * scale)) + 2 * MARGIN
    height = int(math.ceil((lat_max - min(lats)) * scale)) + 2 * MARGIN

    poly = PolyPath([project(la, lo, scale, lat_max, lon_min) for la, lo in COASTLINE])
    ys, xs = np.mgrid[0:height, 0:width]
    centres = np.column_stack([xs.ravel(), ys.ravel()]).astype(float)
    land = poly.contains_points(centres).reshape(height, width)

    grey = np.zeros((height, width), dtype=np.uint8)
    grey[land] = 255
    for la, lo, rla, rlo in MOUNTAINS:
        cx, cy = project(la, lo, scale, lat_max, lon_min)
        rx = rlo * LON_FACTOR * scale
        ry = rla * scale
        inside = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
        grey[inside & land] = 128

    cities = []
    for name, la, lo in CITIES:
        x, y = project(la, lo, scale, lat_max, lon_min)
        cities.append({"name": name, "x": int(round(x)), "y": int(round(y))})
    return grey, cities


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "italy"
    lo, hi = 10.0, 60.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        grey, _ = rasterize(mid)
        if int((grey == 255).sum()) < TARGET_HABITABLE:
            lo = mid
        else:
            hi = mid
    grey, cities = rasterize(hi)
    h, w = grey.shape
    with open(out_dir / "italy.pgm", "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(grey.tobytes())
    for c in cities:
        if grey[c["y"], c["x"]] != 255:
            print(f"warning: {c['name']} not on habitable cell", file=sys.stderr)
    print(json.dumps({"scale": hi, "width": w, "height": h,
                      "habitable": int((grey == 255).sum()),
                      "obstacle": int((grey == 128).sum()),
                      "cities": cities}, indent=1))


if __name__ == "__main__":
    main()
