"""Virtual-agent simulation and latency benchmarking.

The agent hovers around its ground-truth interest regions with Gaussian
jitter, mixes in a configurable share of uniformly random moves, and calls
analyze once per iteration. Quality is accumulated as precision (highlights
landing in a preferred region with a preferred facet), hit ratio (regions
reached at least once), and mean highlight diversity. Wall-clock dependent
behavior is disabled so a seed fully determines the report.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .dataset import Dataset
from .geo import GeoPoint, Viewport, project_to_screen
from .highlight import pairwise_diversity
from .session import PipelineConfig, Session


@dataclass
class InterestRegion:
    """Ground-truth disc of interest with the facets the agent cares about."""

    center: GeoPoint
    radius_deg: float
    preferred_facets: list

    def contains(self, lat: float, lon: float) -> bool:
        dlat = lat - self.center.lat
        dlon = (lon - self.center.lon) * math.cos(math.radians(self.center.lat))
        return dlat * dlat + dlon * dlon <= self.radius_deg ** 2


@dataclass
class AgentProfile:
    regions: list
    moves_per_iteration: int = 40
    jitter_px: float = 25.0
    noise_ratio: float = 0.0
    iterations: int = 5
    canvas: tuple = (1600, 900)

    def __post_init__(self):
        if not self.regions:
            raise ValueError("agent needs at least one interest region")
        if not 0.0 <= self.noise_ratio <= 1.0:
            raise ValueError("noise_ratio must be in [0, 1]")


@dataclass
class EvalReport:
    precision: float
    hit_ratio: float
    diversity: float
    highlight_count: int
    roi_count: int
    iterations: int
    stage_latency_ms: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _percentiles(samples: list) -> dict:
    if not samples:
        return {"p50": 0.0, "p95": 0.0}
    arr = np.asarray(samples)
    return {"p50": round(float(np.percentile(arr, 50)), 3),
            "p95": round(float(np.percentile(arr, 95)), 3)}


def simulate(profile: AgentProfile, dataset: Dataset, viewport: Viewport,
             config: PipelineConfig | None = None, seed: int = 0) -> EvalReport:
    """Run the closed loop with a virtual agent and accumulate quality metrics."""
    rng = np.random.default_rng(seed)
    config = config or PipelineConfig()
    # timing-dependent truncation off: metrics must not depend on the machine
    config.time_limit_ms = None
    session = Session(f"sim-{seed}", dataset, viewport, config)

    centers_px = [project_to_screen(r.center, viewport) for r in profile.regions]
    width, height = profile.canvas
    eps = config.capture.epsilon_ms

    poi_index = {p.id: p for p in dataset.pois}
    hits = set()
    precise = 0
    total_highlights = 0
    total_rois = 0
    diversities = []
    stage_samples: dict[str, list] = {}

    t = 0
    for _ in range(profile.iterations):
        events = []
        for _ in range(profile.moves_per_iteration):
            if rng.random() < profile.noise_ratio:
                x = rng.uniform(-width / 2, width / 2)
                y = rng.uniform(-height / 2, height / 2)
            else:
                c = centers_px[rng.integers(len(centers_px))]
                x = c.x + rng.normal(0.0, profile.jitter_px)
                y = c.y + rng.normal(0.0, profile.jitter_px)
            events.append({"x": int(round(x)), "y": int(round(y)), "t": t})
            t += eps
        session.push_events(events)
        doc = session.analyze()
        for name, ms in doc.get("timings", {}).items():
            stage_samples.setdefault(name, []).append(ms)
        total_rois += len(doc["rois"]["features"])
        for records in doc["highlights"].values():
            if not records:
                continue
            vectors = [dataset.schema.facet_vector(poi_index[r["id"]].attributes)
                       for r in records]
            diversities.append(pairwise_diversity(np.array(vectors)))
            for r in records:
                total_highlights += 1
                poi = poi_index[r["id"]]
                facets = {f"{a}={v}" for a, v in poi.attributes.items()}
                for ri, region in enumerate(profile.regions):
                    if region.contains(poi.location.lat, poi.location.lon):
                        hits.add(ri)
                        if facets & set(region.preferred_facets):
                            precise += 1
                            break
    return EvalReport(
        precision=precise / total_highlights if total_highlights else 0.0,
        hit_ratio=len(hits) / len(profile.regions),
        diversity=float(np.mean(diversities)) if diversities else 0.0,
        highlight_count=total_highlights,
        roi_count=total_rois,
        iterations=profile.iterations,
        stage_latency_ms={k: _percentiles(v) for k, v in sorted(stage_samples.items())},
    )


# -- synthetic worlds for bench and tests ------------------------------------

def synth_dataset(n_pois: int, seed: int = 0, viewport: Viewport | None = None,
                  canvas: tuple = (1600, 900)) -> Dataset:
    """Uniform random POIs over the canvas extent with a small facet schema."""
    from .dataset import ingest_csv

    viewport = viewport or Viewport(48.85, 2.35, 0.001)
    rng = np.random.default_rng(seed)
    width, height = canvas
    lat_span = height * viewport.scale
    lon_span = width * viewport.scale / viewport.cos_gamma
    lats = viewport.gamma + rng.uniform(-lat_span / 2, lat_span / 2, n_pois)
    lons = viewport.theta + rng.uniform(-lon_span / 2, lon_span / 2, n_pois)
    kinds = ["cafe", "museum", "hotel", "bakery", "park"]
    rooms = ["1", "2", "3", "4"]
    lines = ["id,lat,lon,kind,rooms,price"]
    for i in range(n_pois):
        lines.append(
            f"poi-{i:06d},{lats[i]:.7f},{lons[i]:.7f},"
            f"{kinds[rng.integers(len(kinds))]},{rooms[rng.integers(len(rooms))]},"
            f"{rng.integers(40, 400)}")
    return ingest_csv("\n".join(lines), f"synth-{n_pois}-{seed}", name="synthetic",
                      bins={"price": [100, 200, 300]})


def synth_trace(n_points: int, seed: int = 0, n_blobs: int = 4,
                sigma_px: float = 45.0, epsilon_ms: int = 100,
                canvas: tuple = (1600, 900)) -> list:
    """Blobby mouse trace: points cycle through Gaussian hover clusters."""
    rng = np.random.default_rng(seed)
    width, height = canvas
    centers = np.column_stack([
        rng.uniform(-width / 2 + 150, width / 2 - 150, n_blobs),
        rng.uniform(-height / 2 + 150, height / 2 - 150, n_blobs),
    ])
    events = []
    per_blob = max(1, n_points // n_blobs)
    t = 0
    for i in range(n_points):
        c = centers[min(i // per_blob, n_blobs - 1)]
        events.append({
            "x": int(round(c[0] + rng.normal(0, sigma_px))),
            "y": int(round(c[1] + rng.normal(0, sigma_px))),
            "t": t,
        })
        t += epsilon_ms
    return events


def bench(poi_counts, trace_sizes, repetitions: int, seed: int = 0,
          config: PipelineConfig | None = None) -> list[dict]:
    """Measure per-stage analyze latency across dataset and trace scales."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    viewport = Viewport(48.85, 2.35, 0.001)
    rows = []
    for n_pois in poi_counts:
        dataset = synth_dataset(n_pois, seed=seed, viewport=viewport)
        for n_points in trace_sizes:
            base = config or PipelineConfig()
            cfg = PipelineConfig.from_dict(base.to_dict())
            segment_ms = max(1, n_points // 3) * cfg.capture.epsilon_ms
            cfg.capture.psi1_segment_ms = segment_ms
            samples: dict[str, list] = {}
            for rep in range(repetitions):
                events = synth_trace(n_points, seed=seed + rep,
                                     epsilon_ms=cfg.capture.epsilon_ms)
                session = Session(f"bench-{n_pois}-{n_points}-{rep}", dataset,
                                  viewport, cfg)
                session.push_events(events)
                start = time.perf_counter()
                doc = session.analyze()
                wall = (time.perf_counter() - start) * 1000.0
                for name, ms in doc.get("timings", {}).items():
                    samples.setdefault(name, []).append(ms)
                samples.setdefault("wall_ms", []).append(wall)
            rows.append({
                "pois": n_pois,
                "trace_points": n_points,
                "repetitions": repetitions,
                "stages": {k: _percentiles(v) for k, v in sorted(samples.items())},
            })
    return rows
