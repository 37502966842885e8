#!/usr/bin/env python3
"""Generate the synthetic fixture pair under data/fixture.

A 1.5 km x 1.5 km street grid in a projected (metre) frame. The reference
maps lanes as two per-side geometries; the candidate maps them on the
centerline and misses part of the network, more so in the south-east.
Output is deterministic for a given seed.
"""

import argparse
import csv
import json
import math
import os
import random

X0, Y0 = 500000.0, 6100000.0
SIZE = 1500.0
SPACING = 150.0
CELL_AREA = 40000.0


def r3(v):
    return round(v, 3)


def pt(x, y):
    return [r3(X0 + x), r3(Y0 + y)]


def offset_line(a, b, d):
    dx, dy = b[0] - a[0], b[1] - a[1]
    n = math.hypot(dx, dy)
    ox, oy = -dy / n * d, dx / n * d
    return (a[0] + ox, a[1] + oy), (b[0] + ox, b[1] + oy)


def blocks():
    """Street blocks between consecutive intersections, (a, b, horizontal)."""
    lines = [SPACING / 2 + SPACING * i for i in range(int(SIZE / SPACING))]
    out = []
    for y in lines:
        for x0, x1 in zip(lines, lines[1:]):
            out.append(((x0, y), (x1, y), True))
    for x in lines:
        for y0, y1 in zip(lines, lines[1:]):
            out.append(((x, y0), (x, y1), False))
    return out


def feature(fid, coords, props, multi=False):
    geom = {"type": "MultiLineString" if multi else "LineString", "coordinates": coords}
    return {"type": "Feature", "id": fid, "geometry": geom, "properties": props}


def collection(name, feats):
    return {"type": "FeatureCollection", "name": name, "features": feats}


def jittered(rng, a, b, sigma):
    """Block line with a jittered midpoint vertex."""
    mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    dx, dy = b[0] - a[0], b[1] - a[1]
    n = math.hypot(dx, dy)
    j = rng.gauss(0.0, sigma)
    mid = (mx - dy / n * j, my + dx / n * j)
    return [pt(*a), pt(*mid), pt(*b)]


def hex_cells(cell_area):
    s = math.sqrt(2 * cell_area / (3 * math.sqrt(3)))
    cells = []
    for q in range(-2, int(SIZE / (1.5 * s)) + 3):
        for r in range(-int(SIZE / s) - 3, int(SIZE / s) + 3):
            cx = 1.5 * s * q
            cy = math.sqrt(3) * s * (r + q / 2)
            if 0 <= cx <= SIZE and 0 <= cy <= SIZE:
                cells.append((q, r, cx, cy))
    return cells


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "fixture"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    cand, ref = [], []
    for k, (a, b, horizontal) in enumerate(blocks()):
        mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
        track = (horizontal and int(my // SPACING) % 3 == 0) or (not horizontal and int(mx // SPACING) % 4 == 1)
        lane = not track and rng.random() < 0.55
        if not (track or lane):
            continue

        if rng.random() < 0.9:
            if track:
                ref.append(feature(f"r{k}", jittered(rng, a, b, 0.8), {"category": "cycle_track", "segment": k}))
            else:
                left = offset_line(a, b, 4.0)
                right = offset_line(b, a, 4.0)
                coords = [jittered(rng, *left, 0.6), jittered(rng, *right, 0.6)]
                ref.append(feature(f"r{k}", coords, {"category": "cycle_lane", "segment": k}, multi=True))

        # candidate completeness falls off towards the south-east corner
        keep = 0.98 - 0.5 * (mx / SIZE) * (1 - my / SIZE)
        if rng.random() > keep:
            continue
        props = {"highway": "cycleway"} if track else {"highway": "residential", "cycleway": "lane"}
        if rng.random() < 0.4 + 0.5 * my / SIZE:
            props["surface"] = rng.choice(["asphalt", "paving_stones", "concrete"])
        if rng.random() < 0.5:
            props["lit"] = rng.random() < 0.8
        if rng.random() < 0.15:
            props["width"] = str(rng.choice([1.5, 2.0, 2.5]))
        if lane and rng.random() < 0.7:
            props["maxspeed"] = rng.choice(["30", "50"])
        cand.append(feature(f"c{k}", [pt(*a), pt(*b)], props))

    # undershoots: short stubs ending just off an existing candidate block
    stubs = [((300.0, 75.0 + 2.5 * SPACING), 2.0), ((975.0, 75.0 + 6.5 * SPACING), 2.5),
             ((525.0, 75.0 + 4.5 * SPACING), 5.0), ((1200.0, 75.0 + 1.5 * SPACING), 2.8)]
    for i, ((x, y), gap) in enumerate(stubs):
        start = (x, y - SPACING / 2 + gap)
        end = (x + 40.0, y - SPACING / 2 + 60.0)
        cand.append(feature(f"stub{i}", [pt(*start), pt(*end)], {"highway": "cycleway", "surface": "gravel"}))

    # commission: diagonal park paths with no counterpart in the reference
    for i in range(3):
        ax, ay = 120.0 + 400.0 * i, 160.0 + 350.0 * i
        cand.append(feature(f"park{i}", [pt(ax, ay), pt(ax + 90.0, ay + 70.0), pt(ax + 150.0, ay + 160.0)],
                            {"highway": "cycleway", "segregated": "no"}))

    # features without cycling infrastructure are filtered by the rules
    for i in range(4):
        y = 75.0 + SPACING * (2 * i + 1)
        cand.append(feature(f"road{i}", [pt(10.0, y + 20), pt(SIZE - 10.0, y + 20)], {"highway": "primary"}))
    ref.append(feature("r_foot0", [pt(20.0, 30.0), pt(700.0, 40.0)], {"category": "footway"}))

    with open(os.path.join(args.out, "candidate.geojson"), "w") as f:
        json.dump(collection("candidate", cand), f, indent=1)
        f.write("\n")
    with open(os.path.join(args.out, "reference.geojson"), "w") as f:
        json.dump(collection("reference", ref), f, indent=1)
        f.write("\n")

    square = [pt(0, 0), pt(SIZE, 0), pt(SIZE, SIZE), pt(0, SIZE), pt(0, 0)]
    with open(os.path.join(args.out, "study_area.geojson"), "w") as f:
        json.dump(collection("study_area", [{"type": "Feature", "properties": {"name": "fixture"},
                                             "geometry": {"type": "Polygon", "coordinates": [square]}}]), f, indent=1)
        f.write("\n")

    polys = []
    h = SIZE / 2
    for name, (x, y) in {"SW": (0, 0), "SE": (h, 0), "NW": (0, h), "NE": (h, h)}.items():
        ring = [pt(x, y), pt(x + h, y), pt(x + h, y + h), pt(x, y + h), pt(x, y)]
        polys.append({"type": "Feature", "properties": {"name": name},
                      "geometry": {"type": "Polygon", "coordinates": [ring]}})
    with open(os.path.join(args.out, "districts.geojson"), "w") as f:
        json.dump(collection("districts", polys), f, indent=1)
        f.write("\n")

    with open(os.path.join(args.out, "population.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cell_id", "population"])
        for q, r, cx, cy in hex_cells(CELL_AREA):
            dense = 4000 * math.exp(-((cx - 500) ** 2 + (cy - 1000) ** 2) / (2 * 450.0 ** 2))
            w.writerow([f"{q}_{r}", int(dense + rng.uniform(50, 250))])

    config = {
        "candidate": {"name": "crowd", "path": "candidate.geojson", "crs": "local metric"},
        "reference": {"name": "authority", "path": "reference.geojson", "crs": "local metric"},
        "study_area": "study_area.geojson",
        "polygons": "districts.geojson",
        "population": "population.csv",
        "grid": {"cell_area": CELL_AREA},
        "weights": ["knn6", "band400"],
        "n_perm": 999,
        "seed": 20240501,
        "output_dir": "out",
    }
    with open(os.path.join(args.out, "config.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
