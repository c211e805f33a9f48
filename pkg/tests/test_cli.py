import json

import pytest

from roilens.cli import main

from worlds import poi_csv_around, hover_trace

SITE = (-200.0, 50.0)


@pytest.fixture
def world_files(tmp_path):
    dataset = tmp_path / "pois.csv"
    dataset.write_text(poi_csv_around([SITE], per_site=40), encoding="utf-8")
    trace = tmp_path / "trace.jsonl"
    events = hover_trace([SITE, SITE], per_site=40)
    trace.write_text("\n".join(json.dumps(e) for e in events) + "\n", encoding="utf-8")
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "viewport": {"gamma": 48.85, "theta": 2.35, "scale": 0.001},
        "pipeline": {"capture": {"psi1_segment_ms": 4000}},
    }), encoding="utf-8")
    return trace, dataset, config


def test_replay_outputs_document(world_files, capsys):
    trace, dataset, config = world_files
    assert main(["replay", str(trace), str(dataset), "--config", str(config)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema_version"] == 1
    assert len(doc["rois"]["features"]) >= 1
    assert "timings" in doc


def test_replay_empty_trace_ok(world_files, tmp_path, capsys):
    _, dataset, config = world_files
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    assert main(["replay", str(empty), str(dataset), "--config", str(config)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["warning"] == "no recorded points"
    assert doc["rois"]["features"] == []


def test_replay_missing_file_exit_2(world_files, capsys):
    _, dataset, config = world_files
    assert main(["replay", "/nonexistent.jsonl", str(dataset),
                 "--config", str(config)]) == 2
    assert "not found" in capsys.readouterr().err


def test_replay_table_output(world_files, capsys):
    trace, dataset, config = world_files
    assert main(["replay", str(trace), str(dataset), "--config", str(config),
                 "--output", "table"]) == 0
    out = capsys.readouterr().out
    assert "schema_version: 1" in out


def test_simulate_command(world_files, tmp_path, capsys):
    _, dataset, config = world_files
    from roilens import ScreenPoint, project_to_geo
    from worlds import VIEWPORT
    center = project_to_geo(ScreenPoint(*SITE, 0), VIEWPORT)
    profile = tmp_path / "agent.json"
    profile.write_text(json.dumps({
        "regions": [{"lat": center.lat, "lon": center.lon, "radius_deg": 0.2,
                     "preferred_facets": ["kind=cafe", "kind=museum",
                                          "kind=hotel", "kind=bakery"]}],
        "moves_per_iteration": 40,
        "jitter_px": 20,
        "noise_ratio": 0.0,
        "iterations": 4,
    }), encoding="utf-8")
    assert main(["simulate", str(dataset), "--profile", str(profile),
                 "--config", str(config), "--seed", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["hit_ratio"] == 1.0


def test_bench_command(capsys):
    assert main(["bench", "--pois", "1000", "--points", "300", "--reps", "2"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["pois"] == 1000
    assert "total_ms" in rows[0]["stages"]


def test_bench_zero_reps_exit_2(capsys):
    assert main(["bench", "--reps", "0"]) == 2


def test_bench_budget_violation_exit_1(capsys):
    code = main(["bench", "--pois", "2000", "--points", "500", "--reps", "1",
                 "--budget-ms", "0.001"])
    assert code == 1
    assert "budget exceeded" in capsys.readouterr().err


def test_cli_replay_equals_service_analyze(world_files, capsys):
    """The CLI and the HTTP service produce the same analyze document."""
    import io
    from fastapi.testclient import TestClient
    from roilens.service import create_app

    trace, dataset, config = world_files
    assert main(["replay", str(trace), str(dataset), "--config", str(config)]) == 0
    cli_doc = json.loads(capsys.readouterr().out)
    cli_doc.pop("timings", None)
    session_key = cli_doc.pop("session_id")

    app = create_app()
    with TestClient(app) as client:
        files = {"file": ("pois.csv", io.BytesIO(dataset.read_bytes()))}
        ds = client.post("/datasets", files=files).json()
        cfg_doc = json.loads(config.read_text(encoding="utf-8"))
        pipeline = dict(cfg_doc["pipeline"])
        pipeline["time_limit_ms"] = None  # mirror replay's deterministic default
        resp = client.post("/sessions", json={
            "dataset_id": ds["dataset_id"],
            "viewport": cfg_doc["viewport"],
            "config": pipeline,
        })
        session_id = resp.json()["session_id"]
        events = [json.loads(l) for l in trace.read_text().splitlines() if l.strip()]
        client.post(f"/sessions/{session_id}/events", json={"events": events})
        http_doc = client.post(f"/sessions/{session_id}/analyze").json()
    http_doc.pop("timings", None)
    http_doc.pop("session_id")
    assert http_doc == cli_doc
