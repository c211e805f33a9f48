import json

import numpy as np
import pytest

from roilens.dataset import (IngestFormatError, NumericBinner, ingest_csv,
                             ingest_file, ingest_geojson)


CSV_SMALL = """id,lat,lon,kind,rooms
p1,48.85,2.35,apartment,2
p2,48.86,2.36,house,3
p3,48.84,2.34,apartment,1
"""


def test_csv_three_rows():
    ds = ingest_csv(CSV_SMALL, "d1")
    assert len(ds) == 3
    assert [a for a, _ in ds.schema.attributes] == ["kind", "rooms"]
    assert dict(ds.schema.attributes)["kind"] == ("apartment", "house")
    assert ds.pois[0].attributes == {"kind": "apartment", "rooms": "2"}


def test_csv_missing_columns():
    with pytest.raises(IngestFormatError, match="missing required columns"):
        ingest_csv("id,lat\np1,48.0\n", "d1")


def test_csv_malformed_row_reports_line():
    text = "id,lat,lon\np1,48.0,2.0\np2,not-a-number,2.0\n"
    with pytest.raises(IngestFormatError, match="line 3"):
        ingest_csv(text, "d1")


def test_csv_out_of_range_reports_poi():
    text = "id,lat,lon\nokay,48.0,2.0\nbroken,95.0,2.0\n"
    with pytest.raises(IngestFormatError, match="broken"):
        ingest_csv(text, "d1")


def test_csv_duplicate_ids_rejected():
    text = "id,lat,lon\np1,48.0,2.0\np1,48.1,2.1\n"
    with pytest.raises(IngestFormatError, match="duplicate"):
        ingest_csv(text, "d1")


def test_empty_attribute_cells_skipped():
    text = "id,lat,lon,kind\np1,48.0,2.0,\np2,48.1,2.1,cafe\n"
    ds = ingest_csv(text, "d1")
    assert ds.pois[0].attributes == {}
    assert dict(ds.schema.attributes)["kind"] == ("cafe",)


def test_numeric_binning():
    binner = NumericBinner([100, 200, 300])
    assert binner.labels == ["<100", "[100,200)", "[200,300)", ">=300"]
    assert binner.label(50) == "<100"
    assert binner.label(100) == "[100,200)"
    assert binner.label(299.9) == "[200,300)"
    assert binner.label(300) == ">=300"


def test_binned_attribute_schema():
    text = "id,lat,lon,price\np1,48.0,2.0,150\np2,48.1,2.1,950\n"
    ds = ingest_csv(text, "d1", bins={"price": [100, 500]})
    assert dict(ds.schema.attributes)["price"] == ("<100", "[100,500)", ">=500")
    assert ds.pois[0].attributes["price"] == "[100,500)"
    assert ds.pois[1].attributes["price"] == ">=500"


def test_binned_attribute_requires_numeric_value():
    text = "id,lat,lon,price\np1,48.0,2.0,cheap\n"
    with pytest.raises(IngestFormatError, match="line 2"):
        ingest_csv(text, "d1", bins={"price": [100]})


def geojson_doc(features):
    return json.dumps({"type": "FeatureCollection", "features": features})


def test_geojson_points():
    doc = geojson_doc([
        {"type": "Feature", "id": "g1",
         "geometry": {"type": "Point", "coordinates": [2.35, 48.85]},
         "properties": {"kind": "museum"}},
        {"type": "Feature",
         "geometry": {"type": "Point", "coordinates": [2.36, 48.86]},
         "properties": {"id": "g2", "kind": "cafe"}},
    ])
    ds = ingest_geojson(doc, "d2")
    assert [p.id for p in ds.pois] == ["g1", "g2"]
    assert ds.pois[0].location.lon == 2.35
    assert ds.pois[1].attributes == {"kind": "cafe"}


def test_geojson_rejects_non_point():
    doc = geojson_doc([
        {"type": "Feature",
         "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 1]]},
         "properties": {}},
    ])
    with pytest.raises(IngestFormatError, match="Point features only"):
        ingest_geojson(doc, "d2")


def test_facet_matrix_consistent():
    ds = ingest_csv(CSV_SMALL, "d1")
    for i, poi in enumerate(ds.pois):
        assert np.array_equal(ds.facet_matrix[i], ds.schema.facet_vector(poi.attributes))


def test_large_ingest_and_index(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["id,lat,lon,kind"]
    n = 20_000
    lats = rng.uniform(40, 50, n)
    lons = rng.uniform(-5, 5, n)
    for i in range(n):
        lines.append(f"p{i},{lats[i]:.6f},{lons[i]:.6f},k{int(rng.integers(4))}")
    path = tmp_path / "big.csv"
    path.write_text("\n".join(lines), encoding="utf-8")
    ds = ingest_file(path, "big")
    assert len(ds) == n
    for _ in range(100):
        lat0, lat1 = np.sort(rng.uniform(40, 50, 2))
        lon0, lon1 = np.sort(rng.uniform(-5, 5, 2))
        got = ds.quadtree.query_box(lat0, lon0, lat1, lon1)
        expected = np.nonzero((ds.lats >= lat0) & (ds.lats <= lat1)
                              & (ds.lons >= lon0) & (ds.lons <= lon1))[0]
        assert np.array_equal(got, expected)


def test_ingest_file_format_sniffing(tmp_path):
    csv_path = tmp_path / "pois.csv"
    csv_path.write_text(CSV_SMALL, encoding="utf-8")
    assert len(ingest_file(csv_path, "d1")) == 3
    gj = tmp_path / "pois.geojson"
    gj.write_text(geojson_doc([
        {"type": "Feature", "id": "a",
         "geometry": {"type": "Point", "coordinates": [0, 0]}, "properties": {}}
    ]), encoding="utf-8")
    assert len(ingest_file(gj, "d2")) == 1
