"""Session state and the analyze pipeline: capture -> discover -> highlight.

A session owns one recorder, one feedback vector, and an append-only event
log. Replaying the log against the same dataset and config reproduces the
exact analyze documents (timings excluded), which doubles as the test
harness for determinism.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .capture import CaptureConfig, OrderingError, RecorderState, record, segment_stream
from .dataset import Dataset
from .discover import discover_rois
from .feedback import (FeedbackVector, PeculiarityMode, budget, confidence,
                       normalized, peculiarity)
from .geo import ScreenPoint, Viewport, geo_to_screen_xy, project_to_geo
from .highlight import (FuzzyRoi, choose_algorithm, fuzzy_highlight,
                        greedy_highlight)
from .spatial_index import match_points

SCHEMA_VERSION = 1


@dataclass
class PipelineConfig:
    """Every tunable of the analyze pipeline, JSON round-trippable."""

    capture: CaptureConfig = field(default_factory=CaptureConfig)
    eps_px: float = 25.0
    min_pts: int = 5
    xi: float = 7.0
    delta: float = 1.0
    k: int = 10
    weights: tuple = (0.5, 0.25, 0.25)
    similarity_threshold: float = 0.1
    time_limit_ms: float | None = 400.0
    max_candidates: int | None = None
    peculiarity_mode: PeculiarityMode = PeculiarityMode.INVERSE
    algorithm: str = "auto"
    greedy_guard: str = "relevance_bound"

    def __post_init__(self):
        if isinstance(self.capture, dict):
            self.capture = CaptureConfig(**self.capture)
        self.weights = tuple(float(w) for w in self.weights)
        self.peculiarity_mode = PeculiarityMode(self.peculiarity_mode)
        if self.eps_px <= 0 or self.min_pts < 1:
            raise ValueError("eps_px must be > 0 and min_pts >= 1")
        if self.xi <= 0 or self.delta <= 0 or self.k < 0:
            raise ValueError("xi and delta must be > 0, k >= 0")
        if len(self.weights) != 3 or abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must be three values summing to 1")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in [0, 1]")
        if self.algorithm not in ("auto", "greedy", "fuzzy"):
            raise ValueError(f"unknown algorithm policy {self.algorithm!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["peculiarity_mode"] = self.peculiarity_mode.value
        d["capture"]["strategy"] = self.capture.strategy.value
        d["capture"]["psi3_levels"] = list(self.capture.psi3_levels)
        d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d: dict | None) -> "PipelineConfig":
        return cls(**(d or {}))


def _round(value, digits=9):
    return round(float(value), digits)


class Session:
    """Single-user exploration session over one immutable dataset."""

    def __init__(self, session_id: str, dataset: Dataset, viewport: Viewport,
                 config: PipelineConfig | None = None, log_path: str | None = None):
        self.session_id = session_id
        self.dataset = dataset
        self.viewport = viewport
        self.config = config or PipelineConfig()
        self.recorder = RecorderState(epsilon_ms=self.config.capture.epsilon_ms)
        self.feedback = FeedbackVector(dataset.schema)
        self.analyze_calls = 0
        self.last_result: dict | None = None
        self.snapshots: list[dict] = []
        self._log_path = Path(log_path) if log_path else None
        if self._log_path:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)

    # -- event log -------------------------------------------------------

    def _log(self, entry: dict) -> None:
        if self._log_path:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def log_creation(self, dataset_id: str) -> None:
        self._log({
            "type": "create",
            "session_id": self.session_id,
            "dataset_id": dataset_id,
            "viewport": {"gamma": self.viewport.gamma, "theta": self.viewport.theta,
                         "scale": self.viewport.scale},
            "config": self.config.to_dict(),
        })

    # -- operations ------------------------------------------------------

    def push_events(self, events: list[dict]) -> int:
        """Throttle a raw event batch into the recorder; returns accepted count.

        The batch is validated before anything is applied, so an out-of-order
        batch leaves the session untouched.
        """
        last_t = self.recorder.last_seen_t
        parsed = []
        for e in events:
            try:
                p = ScreenPoint(float(e["x"]), float(e["y"]), int(e["t"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise OrderingError(f"malformed event {e!r}: {exc}") from exc
            if p.t < last_t:
                raise OrderingError(f"event at t={p.t} arrived after t={last_t}")
            last_t = p.t
            parsed.append(p)
        accepted = sum(1 for p in parsed if record(p, self.recorder))
        self._log({"type": "events",
                   "events": [{"x": e["x"], "y": e["y"], "t": e["t"]} for e in events]})
        return accepted

    def analyze(self) -> dict:
        """One full pipeline pass; increments the interaction count on success."""
        stages: dict[str, float] = {}
        total_start = time.perf_counter()
        points = self.recorder.snapshot()
        if not points:
            doc = self._empty_document("no recorded points")
            self._log({"type": "analyze"})
            self._persist(doc)
            self.last_result = doc
            return doc

        t0 = time.perf_counter()
        segments = segment_stream(points, self.config.capture)
        stages["capture_ms"] = (time.perf_counter() - t0) * 1000.0

        t_before = self.analyze_calls
        t0 = time.perf_counter()
        rois = discover_rois(segments, self.feedback, t_before, self.config)
        stages["discover_ms"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        matches = [match_points(roi, self.dataset.quadtree, self.viewport) for roi in rois]
        for m in matches:
            if len(m.indices):
                m.facet_vector = self.dataset.facet_matrix[m.indices].any(axis=0).astype(np.uint8)
            else:
                m.facet_vector = np.zeros(len(self.dataset.schema), dtype=np.uint8)
        stages["match_ms"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        for m in matches:
            if len(m.indices):
                self.feedback.add_raw(
                    self.config.delta
                    * self.dataset.facet_matrix[m.indices].sum(axis=0, dtype=float))
        fnorm = normalized(self.feedback)
        pecs = [peculiarity(self.feedback, m.facet_vector, self.config.peculiarity_mode)
                for m in matches]
        budgets = [budget(self.config.k, p) for p in pecs]
        stages["feedback_ms"] = (time.perf_counter() - t0) * 1000.0

        t0 = time.perf_counter()
        conf_now = confidence(self.feedback, t_before, self.config.xi)
        algorithm = choose_algorithm(self.config.algorithm, conf_now)
        highlights = self._run_highlight(algorithm, rois, matches, budgets, fnorm)
        stages["highlight_ms"] = (time.perf_counter() - t0) * 1000.0

        self.analyze_calls += 1
        self.feedback.interaction_count = self.analyze_calls
        stages["total_ms"] = (time.perf_counter() - total_start) * 1000.0

        doc = self._document(rois, matches, pecs, budgets, highlights, algorithm)
        self._log({"type": "analyze"})
        self._persist(doc)
        full = dict(doc)
        full["timings"] = {k: round(v, 3) for k, v in stages.items()}
        self.last_result = full
        return full

    def _run_highlight(self, algorithm, rois, matches, budgets, fnorm) -> dict:
        cfg = self.config
        ids = self.dataset.quadtree.ids
        if algorithm == "greedy":
            out = {}
            for roi, m, kp in zip(rois, matches, budgets):
                poi_ids = [ids[i] for i in m.indices]
                sel = greedy_highlight(
                    poi_ids, self.dataset.facet_matrix[m.indices], fnorm, kp,
                    similarity_threshold=cfg.similarity_threshold,
                    time_limit_ms=cfg.time_limit_ms,
                    guard=cfg.greedy_guard,
                    max_candidates=cfg.max_candidates)
                out[roi.roi_id] = [
                    {"poi_id": pid, "relevance": rel, "contribution": contrib}
                    for pid, rel, contrib in zip(sel.poi_ids, sel.relevances,
                                                 sel.contributions)
                ]
            return out
        pooled = sorted({int(i) for m in matches for i in m.indices})
        row_of = {idx: row for row, idx in enumerate(pooled)}
        if pooled:
            xs, ys = geo_to_screen_xy(self.dataset.lats[pooled], self.dataset.lons[pooled],
                                      self.viewport)
            screen_xy = np.column_stack([xs, ys])
            facet_rows = self.dataset.facet_matrix[pooled]
        else:
            screen_xy = np.zeros((0, 2))
            facet_rows = np.zeros((0, len(self.dataset.schema)), dtype=np.uint8)
        fuzzy_rois = [
            FuzzyRoi(roi.roi_id, roi.polygon.centroid,
                     np.array([row_of[int(i)] for i in m.indices], dtype=int), kp)
            for roi, m, kp in zip(rois, matches, budgets)
        ]
        result = fuzzy_highlight(fuzzy_rois, [ids[i] for i in pooled], facet_rows,
                                 screen_xy, fnorm, weights=cfg.weights)
        return {
            roi_id: [{"poi_id": r["poi_id"], "relevance": r["relevance"],
                      "contribution": r["membership"]} for r in records]
            for roi_id, records in result.selections.items()
        }

    # -- documents -------------------------------------------------------

    def _roi_feature(self, roi, m, pec, kp) -> dict:
        geo_ring = []
        for x, y in roi.polygon.vertices:
            p = project_to_geo(ScreenPoint(x, y, 0), self.viewport)
            geo_ring.append([_round(p.lon), _round(p.lat)])
        geo_ring.append(geo_ring[0])
        return {
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [geo_ring]},
            "properties": {
                "roi_id": roi.roi_id,
                "source": list(roi.source),
                "area_px2": _round(roi.area, 6),
                "peculiarity": _round(pec, 9),
                "k_budget": kp,
                "matched_count": int(len(m.indices)),
                "pixel_vertices": [[_round(x, 6), _round(y, 6)]
                                   for x, y in roi.polygon.vertices],
            },
        }

    def _document(self, rois, matches, pecs, budgets, highlights, algorithm) -> dict:
        highlight_doc = {}
        for roi in rois:
            records = []
            for rec in highlights.get(roi.roi_id, []):
                loc = self.dataset.poi_by_id(rec["poi_id"]).location
                records.append({
                    "id": rec["poi_id"],
                    "lat": _round(loc.lat),
                    "lon": _round(loc.lon),
                    "relevance": _round(rec["relevance"]),
                    "contribution": _round(rec["contribution"]),
                    "algorithm": algorithm,
                })
            highlight_doc[roi.roi_id] = records
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "interaction_count": self.analyze_calls,
            "rois": {
                "type": "FeatureCollection",
                "features": [self._roi_feature(r, m, p, kp)
                             for r, m, p, kp in zip(rois, matches, pecs, budgets)],
            },
            "highlights": highlight_doc,
            "algorithm": algorithm,
            "feedback": self.feedback_view(),
            "confidence": _round(confidence(self.feedback, None, self.config.xi)),
        }

    def _empty_document(self, warning: str) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "interaction_count": self.analyze_calls,
            "rois": {"type": "FeatureCollection", "features": []},
            "highlights": {},
            "algorithm": None,
            "feedback": self.feedback_view(),
            "confidence": _round(confidence(self.feedback, None, self.config.xi)),
            "warning": warning,
        }

    def feedback_view(self) -> dict:
        return {
            "raw": {k: _round(v, 6) for k, v in self.feedback.raw_view().items()},
            "normalized": {k: _round(v, 12) for k, v in self.feedback.normalized_view().items()},
            "interaction_count": self.feedback.interaction_count,
            "nonzero_facets": self.feedback.nnz(),
        }

    def status(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "dataset_poi_count": len(self.dataset),
            "recorded_points": len(self.recorder.points),
            "interaction_count": self.analyze_calls,
            "viewport": {"gamma": self.viewport.gamma, "theta": self.viewport.theta,
                         "scale": self.viewport.scale},
        }

    def _persist(self, doc: dict) -> None:
        self.snapshots.append(doc)
        if self._log_path:
            snap_dir = self._log_path.parent / "snapshots"
            snap_dir.mkdir(exist_ok=True)
            path = snap_dir / f"analyze-{len(self.snapshots):04d}.json"
            path.write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")


def replay_session_log(lines, dataset: Dataset, session_id: str | None = None):
    """Rebuild a session from its JSONL event log; returns (session, analyze docs)."""
    session = None
    docs = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        entry = json.loads(line)
        kind = entry.get("type")
        if kind == "create":
            vp = entry["viewport"]
            session = Session(
                session_id or entry["session_id"], dataset,
                Viewport(vp["gamma"], vp["theta"], vp.get("scale", 1.0)),
                PipelineConfig.from_dict(entry.get("config")))
        elif kind == "events":
            session.push_events(entry["events"])
        elif kind == "analyze":
            doc = session.analyze()
            doc.pop("timings", None)
            docs.append(doc)
        else:
            raise ValueError(f"unknown log entry type {kind!r}")
    return session, docs
