"""Command-line driver: trace replay, agent simulation, latency bench, serve."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dataset import ingest_file
from .geo import GeoPoint, Viewport
from .session import PipelineConfig, Session
from .simulate import AgentProfile, InterestRegion, bench, simulate

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2


def _load_json(path: str, what: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return json.loads(p.read_text(encoding="utf-8"))


def _load_config(path: str | None) -> tuple[Viewport, PipelineConfig, dict, bool]:
    doc = _load_json(path, "config") if path else {}
    vp = doc.get("viewport") or {}
    viewport = Viewport(float(vp.get("gamma", 0.0)), float(vp.get("theta", 0.0)),
                        float(vp.get("scale", 1.0)))
    pipeline = dict(doc.get("pipeline") or {})
    explicit_limit = "time_limit_ms" in pipeline
    config = PipelineConfig.from_dict(pipeline)
    return viewport, config, doc.get("bins") or {}, explicit_limit


def _load_trace(path: str) -> list[dict]:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"trace file not found: {path}")
    events = []
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            events.append(json.loads(line))
    return events


def _emit(doc, output: str) -> None:
    if output == "json":
        print(json.dumps(doc, sort_keys=True, indent=1))
        return
    _print_table(doc)


def _print_table(doc, indent: str = "") -> None:
    if isinstance(doc, dict):
        for key in doc:
            value = doc[key]
            if isinstance(value, (dict, list)):
                print(f"{indent}{key}:")
                _print_table(value, indent + "  ")
            else:
                print(f"{indent}{key}: {value}")
    elif isinstance(doc, list):
        for item in doc:
            _print_table(item, indent + "  ")
            print()
    else:
        print(f"{indent}{doc}")


def cmd_replay(args) -> int:
    viewport, config, bins, explicit_limit = _load_config(args.config)
    if not explicit_limit:
        config.time_limit_ms = None  # deterministic unless the config opts in
    dataset = ingest_file(args.dataset, "replay-dataset", bins=bins)
    events = _load_trace(args.trace)
    session = Session("replay", dataset, viewport, config)
    if events:
        session.push_events(events)
    doc = session.analyze()
    _emit(doc, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    viewport, config, bins, _ = _load_config(args.config)
    dataset = ingest_file(args.dataset, "sim-dataset", bins=bins)
    profile_doc = _load_json(args.profile, "profile")
    regions = [
        InterestRegion(GeoPoint(r["lat"], r["lon"]), float(r["radius_deg"]),
                       list(r.get("preferred_facets", [])))
        for r in profile_doc.get("regions", [])
    ]
    profile = AgentProfile(
        regions=regions,
        moves_per_iteration=int(profile_doc.get("moves_per_iteration", 40)),
        jitter_px=float(profile_doc.get("jitter_px", 25.0)),
        noise_ratio=float(profile_doc.get("noise_ratio", 0.0)),
        iterations=int(profile_doc.get("iterations", 5)),
        canvas=tuple(profile_doc.get("canvas", (1600, 900))),
    )
    report = simulate(profile, dataset, viewport, config, seed=args.seed)
    _emit(report.to_dict(), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        rows = bench(args.pois, args.points, args.reps, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(rows, args.output)
    if args.budget_ms is not None:
        worst = max(row["stages"]["total_ms"]["p95"] for row in rows)
        if worst > args.budget_ms:
            print(f"budget exceeded: p95 total {worst:.1f} ms > {args.budget_ms} ms",
                  file=sys.stderr)
            return EXIT_THRESHOLD
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roilens")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="run one analyze pass over a recorded trace")
    p.add_argument("trace", help="JSONL trace: one {x, y, t} event per line")
    p.add_argument("dataset", help="POI dataset (CSV or GeoJSON)")
    p.add_argument("--config", help="JSON config with viewport/pipeline/bins")
    p.add_argument("--output", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", help="closed-loop virtual agent evaluation")
    p.add_argument("dataset")
    p.add_argument("--profile", required=True, help="agent profile JSON")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="per-stage latency percentiles")
    p.add_argument("--pois", type=_int_list, default=[10_000])
    p.add_argument("--points", type=_int_list, default=[2_000])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-ms", type=float, default=None,
                   help="exit 1 if any p95 total exceeds this")
    p.add_argument("--output", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=os.environ.get("ROILENS_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("ROILENS_PORT", "8000")))
    p.add_argument("--data-dir", default=os.environ.get("ROILENS_DATA_DIR"))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
