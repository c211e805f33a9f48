import numpy as np
import pytest

from roilens import (ConvexPolygon, GeoPoint, POI, Quadtree, ScreenPoint,
                     Viewport, build_index, facet_vector, match_points,
                     project_to_geo)
from roilens.discover import ROI
from roilens.spatial_index import IngestError

from conftest import make_poi
from oracles import naive_match


def quadrant_pois():
    return [
        make_poi("ne", 45.0, 90.0),
        make_poi("nw", 45.0, -90.0),
        make_poi("se", -45.0, 90.0),
        make_poi("sw", -45.0, -90.0),
    ]


def test_four_quadrants_split_once():
    tree = build_index(quadrant_pois(), capacity=1,
                       bounds=(-90.0, -180.0, 90.0, 180.0))
    assert tree.leaf_count() == 4
    assert [tree.ids[i] for i in tree.query_box(0, 0, 90, 180)] == ["ne"]


def test_empty_tree():
    tree = build_index([], capacity=4)
    assert tree.leaf_count() == 1
    assert len(tree.query_box(-90, -180, 90, 180)) == 0


def test_poi_outside_bounds_named_in_error():
    with pytest.raises(IngestError, match="far-away"):
        build_index([make_poi("inside", 10.0, 10.0), make_poi("far-away", 80.0, 80.0)],
                    bounds=(0.0, 0.0, 20.0, 20.0))


def test_every_poi_in_exactly_one_leaf():
    rng = np.random.default_rng(0)
    pois = [make_poi(f"p{i}", rng.uniform(40, 50), rng.uniform(-5, 5))
            for i in range(500)]
    tree = build_index(pois, capacity=8, max_depth=10)
    counts = np.zeros(len(pois), dtype=int)
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.children is not None:
            stack.extend(node.children)
            assert not node.items
        else:
            for i in node.items:
                counts[i] += 1
            assert node.depth <= 10
    assert np.all(counts == 1)


@pytest.mark.parametrize("seed", range(4))
def test_range_query_matches_linear_scan(seed):
    rng = np.random.default_rng(seed)
    n = 10_000
    lats = rng.uniform(40, 50, n)
    lons = rng.uniform(-5, 5, n)
    tree = Quadtree(lats, lons, [f"p{i}" for i in range(n)], capacity=32)
    for _ in range(100):
        lat0, lat1 = np.sort(rng.uniform(40, 50, 2))
        lon0, lon1 = np.sort(rng.uniform(-5, 5, 2))
        got = tree.query_box(lat0, lon0, lat1, lon1)
        expected = np.nonzero((lats >= lat0) & (lats <= lat1)
                              & (lons >= lon0) & (lons <= lon1))[0]
        assert np.array_equal(got, expected)


def roi_at(vertices, roi_id="roi-1"):
    return ROI(roi_id, ConvexPolygon(vertices), ("s1c1", "s2c1"))


def test_match_centroid_and_just_outside(viewport):
    roi = roi_at([(-100, -100), (100, -100), (100, 100), (-100, 100)])
    center_geo = project_to_geo(ScreenPoint(0, 0, 0), viewport)
    outside_geo = project_to_geo(ScreenPoint(101, 0, 0), viewport)
    pois = [POI("inside", center_geo, {}), POI("outside", outside_geo, {})]
    tree = build_index(pois)
    matched = match_points(roi, tree, viewport)
    assert matched.poi_ids == {"inside"}


def test_match_point_on_edge_is_matched(viewport):
    roi = roi_at([(-100, -100), (100, -100), (100, 100), (-100, 100)])
    edge_geo = project_to_geo(ScreenPoint(100, 0, 0), viewport)
    tree = build_index([POI("edge", edge_geo, {})])
    assert match_points(roi, tree, viewport).poi_ids == {"edge"}


@pytest.mark.parametrize("seed", range(5))
def test_match_equals_naive_scan(seed, viewport):
    rng = np.random.default_rng(seed)
    n = 10_000
    lat_span = 450 * viewport.scale
    lon_span = 800 * viewport.scale / viewport.cos_gamma
    lats = viewport.gamma + rng.uniform(-lat_span, lat_span, n)
    lons = viewport.theta + rng.uniform(-lon_span, lon_span, n)
    tree = Quadtree(lats, lons, [f"p{i}" for i in range(n)], capacity=64)
    for _ in range(20):
        cx, cy = rng.uniform(-400, 400), rng.uniform(-200, 200)
        pts = rng.normal((cx, cy), 80, size=(12, 2))
        from roilens import Cluster, convex_hull
        roi = roi_at(convex_hull(
            Cluster(1, [ScreenPoint(x, y, 0) for x, y in pts])).vertices)
        got = match_points(roi, tree, viewport)
        expected = naive_match(roi.polygon.vertices, lats, lons,
                               viewport.gamma, viewport.theta, viewport.scale)
        assert np.array_equal(got.indices, expected)
        assert got.poi_ids == {f"p{i}" for i in expected}


def test_facet_vector_single_poi(schema):
    vec = facet_vector([make_poi("p", 48, 2, rooms="2", kind="apartment")], schema)
    assert vec.tolist() == [1, 0, 0, 1, 0]


def test_facet_vector_empty_match(schema):
    assert facet_vector([], schema).tolist() == [0] * 5


def test_facet_vector_union(schema):
    a = [make_poi("p1", 48, 2, rooms="1")]
    b = [make_poi("p2", 48, 2, rooms="2"), make_poi("p3", 48, 2, rooms="3")]
    combined = facet_vector(a + b, schema)
    assert np.array_equal(combined, facet_vector(a, schema) | facet_vector(b, schema))
    assert combined[2:].tolist() == [1, 1, 1]  # all rooms facets covered
