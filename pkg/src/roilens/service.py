"""HTTP boundary: datasets, sessions, events, analyze.

Sessions live in memory behind per-session locks with write-through JSONL
event logs; a restart rebuilds everything by replaying the logs against the
re-ingested datasets. Every response carries a schema_version field.
"""
from __future__ import annotations

import hashlib
import json
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware

from .capture import OrderingError
from .dataset import IngestFormatError, ingest_csv, ingest_geojson
from .geo import RoilensError, Viewport
from .session import SCHEMA_VERSION, PipelineConfig, Session, replay_session_log
from .spatial_index import IngestError


class Registry:
    """Process-wide datasets and sessions, optionally persisted under data_dir."""

    def __init__(self, data_dir: str | None = None):
        self.datasets = {}
        self.sessions = {}
        self.session_locks = {}
        self.data_dir = Path(data_dir) if data_dir else None
        self._create_lock = threading.Lock()
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._rebuild()

    # -- persistence ------------------------------------------------------

    def _dataset_dir(self, dataset_id: str) -> Path:
        return self.data_dir / "datasets" / dataset_id

    def _session_log(self, session_id: str) -> Path | None:
        if not self.data_dir:
            return None
        return self.data_dir / "sessions" / session_id / "events.jsonl"

    def _rebuild(self) -> None:
        ds_root = self.data_dir / "datasets"
        if ds_root.is_dir():
            for ds_dir in sorted(ds_root.iterdir()):
                meta_path = ds_dir / "meta.json"
                if not meta_path.is_file():
                    continue
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
                text = (ds_dir / meta["source"]).read_text(encoding="utf-8")
                self._ingest(text, meta["format"], meta.get("name", ""),
                             meta.get("bins") or {}, persist=False,
                             dataset_id=meta["dataset_id"])
        sess_root = self.data_dir / "sessions"
        if sess_root.is_dir():
            for sess_dir in sorted(sess_root.iterdir()):
                log = sess_dir / "events.jsonl"
                if not log.is_file():
                    continue
                lines = log.read_text(encoding="utf-8").splitlines()
                if not lines:
                    continue
                head = json.loads(lines[0])
                dataset = self.datasets.get(head.get("dataset_id"))
                if dataset is None:
                    continue
                session, _ = replay_session_log(lines, dataset)
                session._log_path = log
                self.sessions[session.session_id] = session
                self.session_locks[session.session_id] = threading.Lock()

    # -- operations -------------------------------------------------------

    def _ingest(self, text: str, fmt: str, name: str, bins: dict,
                persist: bool = True, dataset_id: str | None = None):
        if dataset_id is None:
            digest = hashlib.sha256(
                (text + json.dumps(bins, sort_keys=True)).encode("utf-8")).hexdigest()
            dataset_id = f"ds-{digest[:12]}"
        if dataset_id in self.datasets:
            return self.datasets[dataset_id]
        ingest = ingest_csv if fmt == "csv" else ingest_geojson
        dataset = ingest(text, dataset_id, name=name, bins=bins)
        self.datasets[dataset_id] = dataset
        if persist and self.data_dir:
            ds_dir = self._dataset_dir(dataset_id)
            ds_dir.mkdir(parents=True, exist_ok=True)
            source = f"source.{fmt}"
            (ds_dir / source).write_text(text, encoding="utf-8")
            (ds_dir / "meta.json").write_text(json.dumps({
                "dataset_id": dataset_id, "name": name, "format": fmt,
                "bins": bins, "source": source,
            }, sort_keys=True), encoding="utf-8")
        return dataset

    def add_dataset(self, text: str, fmt: str, name: str = "", bins: dict | None = None):
        return self._ingest(text, fmt, name, bins or {})

    def create_session(self, dataset_id: str, viewport: Viewport,
                       config: PipelineConfig) -> Session:
        dataset = self.datasets.get(dataset_id)
        if dataset is None:
            raise KeyError(dataset_id)
        with self._create_lock:
            session_id = f"sess-{uuid.uuid4().hex[:10]}"
            log = self._session_log(session_id)
            session = Session(session_id, dataset, viewport, config,
                              log_path=str(log) if log else None)
            session.log_creation(dataset_id)
            self.sessions[session_id] = session
            self.session_locks[session_id] = threading.Lock()
        return session

    def get_session(self, session_id: str) -> tuple[Session, threading.Lock]:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session, self.session_locks[session_id]


def _guess_format(filename: str, declared: str | None) -> str:
    if declared in ("csv", "geojson"):
        return declared
    lower = (filename or "").lower()
    return "geojson" if lower.endswith((".geojson", ".json")) else "csv"


def create_app(data_dir: str | None = None,
               config_defaults: dict | None = None) -> FastAPI:
    app = FastAPI(title="roilens")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    registry = Registry(data_dir)
    app.state.registry = registry
    defaults = config_defaults or {}

    @app.post("/datasets")
    def post_dataset(file: UploadFile = File(...), name: str = Form(""),
                     bins: str = Form("{}"), format: str | None = Form(None)):
        try:
            bin_config = json.loads(bins) if bins else {}
        except json.JSONDecodeError as exc:
            raise HTTPException(400, f"bins is not valid JSON: {exc}")
        text = file.file.read().decode("utf-8")
        fmt = _guess_format(file.filename, format)
        try:
            dataset = registry.add_dataset(text, fmt, name=name or file.filename or "",
                                           bins=bin_config)
        except (IngestFormatError, IngestError, ValueError) as exc:
            raise HTTPException(400, str(exc))
        return {"schema_version": SCHEMA_VERSION, **dataset.summary()}

    @app.post("/sessions")
    def post_session(body: dict):
        dataset_id = body.get("dataset_id")
        vp = body.get("viewport") or {}
        try:
            viewport = Viewport(float(vp.get("gamma", 0.0)), float(vp.get("theta", 0.0)),
                                float(vp.get("scale", 1.0)))
            merged = {**defaults, **(body.get("config") or {})}
            config = PipelineConfig.from_dict(merged)
        except (RoilensError, ValueError, TypeError) as exc:
            raise HTTPException(400, str(exc))
        try:
            session = registry.create_session(dataset_id, viewport, config)
        except KeyError:
            raise HTTPException(404, f"unknown dataset {dataset_id!r}")
        return {"schema_version": SCHEMA_VERSION, "session_id": session.session_id}

    def _session_or_404(session_id: str):
        try:
            return registry.get_session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")

    @app.post("/sessions/{session_id}/events")
    def post_events(session_id: str, body: dict):
        session, lock = _session_or_404(session_id)
        events = body.get("events")
        if not isinstance(events, list):
            raise HTTPException(400, "body must carry an 'events' list")
        with lock:
            try:
                accepted = session.push_events(events)
            except OrderingError as exc:
                raise HTTPException(400, str(exc))
        return {"schema_version": SCHEMA_VERSION, "accepted": accepted}

    @app.post("/sessions/{session_id}/analyze")
    def post_analyze(session_id: str):
        session, lock = _session_or_404(session_id)
        with lock:
            return session.analyze()

    @app.get("/sessions/{session_id}/feedback")
    def get_feedback(session_id: str):
        session, _ = _session_or_404(session_id)
        return {"schema_version": SCHEMA_VERSION, **session.feedback_view()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session, _ = _session_or_404(session_id)
        return session.status()

    return app
