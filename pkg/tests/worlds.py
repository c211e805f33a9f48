"""Shared synthetic worlds: POI datasets plus traces hovering over them."""
from __future__ import annotations

import numpy as np

from roilens import ScreenPoint, Viewport, project_to_geo
from roilens.dataset import ingest_csv

VIEWPORT = Viewport(48.85, 2.35, 0.001)

KINDS = ["cafe", "museum", "hotel", "bakery"]
ROOMS = ["1", "2", "3"]


def poi_csv_around(sites_px, per_site=30, spread_px=60.0, seed=0,
                   viewport=VIEWPORT, extras=0, canvas=(1600, 900)):
    """CSV text with POIs clustered in pixel space around the given sites."""
    rng = np.random.default_rng(seed)
    lines = ["id,lat,lon,kind,rooms"]
    idx = 0
    for cx, cy in sites_px:
        for _ in range(per_site):
            x = cx + rng.normal(0, spread_px)
            y = cy + rng.normal(0, spread_px)
            p = project_to_geo(ScreenPoint(x, y, 0), viewport)
            lines.append(f"poi-{idx:05d},{p.lat:.7f},{p.lon:.7f},"
                         f"{KINDS[rng.integers(len(KINDS))]},{ROOMS[rng.integers(len(ROOMS))]}")
            idx += 1
    width, height = canvas
    for _ in range(extras):
        p = project_to_geo(ScreenPoint(rng.uniform(-width / 2, width / 2),
                                       rng.uniform(-height / 2, height / 2), 0), viewport)
        lines.append(f"poi-{idx:05d},{p.lat:.7f},{p.lon:.7f},"
                     f"{KINDS[rng.integers(len(KINDS))]},{ROOMS[rng.integers(len(ROOMS))]}")
        idx += 1
    return "\n".join(lines)


def hover_trace(sites_px, per_site=40, sigma_px=20.0, epsilon_ms=100, seed=0,
                start_t=0):
    """Raw events hovering each site in turn, spaced exactly epsilon apart."""
    rng = np.random.default_rng(seed)
    events = []
    t = start_t
    for cx, cy in sites_px:
        for _ in range(per_site):
            events.append({"x": int(round(cx + rng.normal(0, sigma_px))),
                           "y": int(round(cy + rng.normal(0, sigma_px))),
                           "t": t})
            t += epsilon_ms
    return events


def simple_world(seed=0):
    """One hot site with POIs, a two-segment trace hovering it twice."""
    site = (-200.0, 50.0)
    csv_text = poi_csv_around([site], per_site=40, spread_px=50.0, seed=seed)
    dataset = ingest_csv(csv_text, f"world-{seed}")
    trace = hover_trace([site, site], per_site=40, sigma_px=25.0, seed=seed)
    return dataset, VIEWPORT, trace, site


# Three-segment scenario with four planted cross-segment overlaps:
# site A is revisited in every segment (three pairwise overlaps), site B in
# the first two (one more), and the third segment ends on a lone detour.
FIG3_SITE_A = (-350.0, 80.0)
FIG3_SITE_B = (300.0, -120.0)
FIG3_LONE = (550.0, 300.0)
FIG3_SEGMENT_SITES = [
    [FIG3_SITE_A, FIG3_SITE_B],   # segment 1
    [FIG3_SITE_A, FIG3_SITE_B],   # segment 2
    [FIG3_SITE_A, FIG3_LONE],     # segment 3
]
FIG3_PER_BLOB = 50
FIG3_SIGMA = 30.0
FIG3_SEGMENT_MS = FIG3_PER_BLOB * 2 * 100  # two blobs of 50 moves at 100 ms


def fig3_trace():
    events = []
    t = 0
    for seg_index, sites in enumerate(FIG3_SEGMENT_SITES):
        batch = hover_trace(sites, per_site=FIG3_PER_BLOB, sigma_px=FIG3_SIGMA,
                            seed=100 + seg_index, start_t=t)
        events.extend(batch)
        t = batch[-1]["t"] + 100
    return events


def fig3_dataset():
    csv_text = poi_csv_around([FIG3_SITE_A, FIG3_SITE_B, FIG3_LONE],
                              per_site=35, spread_px=55.0, seed=7, extras=80)
    return ingest_csv(csv_text, "fig3"), csv_text


def fig3_config_dict():
    return {
        "viewport": {"gamma": VIEWPORT.gamma, "theta": VIEWPORT.theta,
                     "scale": VIEWPORT.scale},
        "pipeline": {
            "capture": {"strategy": "psi1", "psi1_segment_ms": FIG3_SEGMENT_MS},
            "eps_px": 25.0,
            "min_pts": 5,
            "algorithm": "greedy",
        },
    }
