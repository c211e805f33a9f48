"""POI dataset ingestion: CSV and GeoJSON sources, facet schema derivation.

Categorical attribute values are enumerated into the schema as-is; attributes
named in the bin config are parsed as numbers and discretized into labeled
interval bins so the feedback machinery always works over finite domains.
The quadtree index is built once here; datasets are immutable afterwards.
"""
from __future__ import annotations

import csv
import io
import json
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .feedback import FacetSchema
from .geo import GeoPoint, POI, RoilensError
from .spatial_index import Quadtree


class IngestFormatError(RoilensError):
    """Source file cannot be parsed into POIs."""


def _format_edge(value: float) -> str:
    return f"{value:g}"


class NumericBinner:
    """Maps numeric values to interval labels derived from sorted bin edges."""

    def __init__(self, edges):
        edges = [float(e) for e in edges]
        if len(edges) < 1 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError(f"bin edges must be strictly increasing, got {edges}")
        self.edges = edges
        self.labels = [f"<{_format_edge(edges[0])}"]
        for a, b in zip(edges, edges[1:]):
            self.labels.append(f"[{_format_edge(a)},{_format_edge(b)})")
        self.labels.append(f">={_format_edge(edges[-1])}")

    def label(self, value: float) -> str:
        return self.labels[bisect_right(self.edges, value)]


@dataclass
class Dataset:
    """Immutable POI collection with derived schema, facet matrix, and index."""

    dataset_id: str
    name: str
    pois: list
    schema: FacetSchema
    lats: np.ndarray
    lons: np.ndarray
    facet_matrix: np.ndarray
    quadtree: Quadtree
    bins: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pois)

    def __post_init__(self):
        self._by_id = {p.id: p for p in self.pois}

    def poi_by_index(self, i: int) -> POI:
        return self.pois[i]

    def poi_by_id(self, poi_id: str) -> POI:
        return self._by_id[poi_id]

    def summary(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "poi_count": len(self.pois),
            "attributes": {a: list(dom) for a, dom in self.schema.attributes},
        }


def _build_dataset(dataset_id, name, rows, bins, capacity, max_depth) -> Dataset:
    """Assemble a dataset from parsed (id, lat, lon, raw-attributes) rows."""
    binners = {attr: NumericBinner(edges) for attr, edges in (bins or {}).items()}
    pois = []
    seen_ids = set()
    domains: dict[str, set] = {}
    for line_no, poi_id, lat, lon, raw_attrs in rows:
        if poi_id in seen_ids:
            raise IngestFormatError(f"line {line_no}: duplicate POI id {poi_id!r}")
        seen_ids.add(poi_id)
        try:
            location = GeoPoint(lat, lon)
        except ValueError as exc:
            raise IngestFormatError(f"POI {poi_id!r}: {exc}") from exc
        attrs = {}
        for attr, value in raw_attrs.items():
            if value is None or value == "":
                continue
            if attr in binners:
                try:
                    value = binners[attr].label(float(value))
                except (TypeError, ValueError) as exc:
                    raise IngestFormatError(
                        f"line {line_no}: attribute {attr!r} is binned but value "
                        f"{value!r} is not numeric") from exc
            else:
                value = str(value)
            attrs[attr] = value
            domains.setdefault(attr, set()).add(value)
        pois.append(POI(poi_id, location, attrs))

    schema_attrs = []
    for attr in sorted(domains):
        if attr in binners:
            schema_attrs.append((attr, tuple(binners[attr].labels)))
        else:
            schema_attrs.append((attr, tuple(sorted(domains[attr]))))
    schema = FacetSchema(schema_attrs)

    lats = np.array([p.location.lat for p in pois], dtype=float)
    lons = np.array([p.location.lon for p in pois], dtype=float)
    if len(pois):
        facet_matrix = np.stack([schema.facet_vector(p.attributes) for p in pois])
    else:
        facet_matrix = np.zeros((0, len(schema)), dtype=np.uint8)
    quadtree = Quadtree(lats, lons, [p.id for p in pois],
                        capacity=capacity, max_depth=max_depth)
    return Dataset(dataset_id, name, pois, schema, lats, lons, facet_matrix,
                   quadtree, dict(bins or {}))


def ingest_csv(text: str, dataset_id: str, name: str = "", bins: dict | None = None,
               capacity: int = 64, max_depth: int = 12) -> Dataset:
    """Parse a CSV with header columns id, lat, lon and attribute columns."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise IngestFormatError("line 1: empty CSV, header required")
    missing = {"id", "lat", "lon"} - set(reader.fieldnames)
    if missing:
        raise IngestFormatError(f"line 1: missing required columns {sorted(missing)}")
    attr_cols = [c for c in reader.fieldnames if c not in ("id", "lat", "lon")]
    rows = []
    for line_no, row in enumerate(reader, start=2):
        if row.get("id") in (None, ""):
            raise IngestFormatError(f"line {line_no}: missing id")
        try:
            lat = float(row["lat"])
            lon = float(row["lon"])
        except (TypeError, ValueError) as exc:
            raise IngestFormatError(f"line {line_no}: lat/lon not numeric") from exc
        rows.append((line_no, row["id"], lat, lon, {c: row.get(c) for c in attr_cols}))
    return _build_dataset(dataset_id, name or dataset_id, rows, bins, capacity, max_depth)


def ingest_geojson(text: str, dataset_id: str, name: str = "", bins: dict | None = None,
                   capacity: int = 64, max_depth: int = 12) -> Dataset:
    """Parse a GeoJSON FeatureCollection of Point features."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestFormatError(f"invalid JSON: {exc}") from exc
    if doc.get("type") != "FeatureCollection":
        raise IngestFormatError("expected a GeoJSON FeatureCollection")
    rows = []
    for i, feature in enumerate(doc.get("features", [])):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Point":
            raise IngestFormatError(
                f"feature {i}: Point features only, got {geom.get('type')!r}")
        coords = geom.get("coordinates") or []
        if len(coords) < 2:
            raise IngestFormatError(f"feature {i}: malformed coordinates")
        lon, lat = float(coords[0]), float(coords[1])
        props = dict(feature.get("properties") or {})
        poi_id = feature.get("id") or props.pop("id", None) or f"poi-{i}"
        rows.append((i, str(poi_id), lat, lon, props))
    return _build_dataset(dataset_id, name or dataset_id, rows, bins, capacity, max_depth)


def ingest_file(path, dataset_id: str, name: str = "", bins: dict | None = None,
                fmt: str | None = None, capacity: int = 64, max_depth: int = 12) -> Dataset:
    """Ingest from disk, sniffing the format from the extension when not given."""
    text = open(path, "r", encoding="utf-8").read()
    if fmt is None:
        lower = str(path).lower()
        fmt = "geojson" if lower.endswith((".geojson", ".json")) else "csv"
    if fmt == "csv":
        return ingest_csv(text, dataset_id, name, bins, capacity, max_depth)
    if fmt == "geojson":
        return ingest_geojson(text, dataset_id, name, bins, capacity, max_depth)
    raise IngestFormatError(f"unknown dataset format {fmt!r}")
