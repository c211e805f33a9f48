"""Quadtree index over POI coordinates and ROI-to-POI matching.

The tree stores POI indices in leaves only; leaf boxes tile the root box, so
every POI lives in exactly one leaf. Matching projects an ROI's pixel bounding
box into lat/lon, pulls candidates from the intersecting cells, and runs the
exact convex containment test on the projected candidates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geo import RoilensError, Viewport, geo_to_screen_xy, screen_bbox_to_geo

# padding (degrees) applied to query boxes so float rounding at the bbox edge
# can never drop a true candidate; false candidates fail the exact test anyway
_QUERY_PAD = 1e-7


class IngestError(RoilensError):
    """Raised when a POI cannot be placed in the index."""


@dataclass
class MatchedSet:
    """POIs whose projected location falls inside one ROI."""

    roi_id: str
    indices: np.ndarray
    poi_ids: set
    facet_vector: np.ndarray | None = None


class _Node:
    __slots__ = ("lat_min", "lon_min", "lat_max", "lon_max", "depth", "items", "children")

    def __init__(self, lat_min, lon_min, lat_max, lon_max, depth):
        self.lat_min = lat_min
        self.lon_min = lon_min
        self.lat_max = lat_max
        self.lon_max = lon_max
        self.depth = depth
        self.items = []
        self.children = None

    def child_for(self, lat, lon):
        mid_lat = (self.lat_min + self.lat_max) / 2.0
        mid_lon = (self.lon_min + self.lon_max) / 2.0
        return self.children[(2 if lat >= mid_lat else 0) + (1 if lon >= mid_lon else 0)]

    def split(self):
        mid_lat = (self.lat_min + self.lat_max) / 2.0
        mid_lon = (self.lon_min + self.lon_max) / 2.0
        d = self.depth + 1
        self.children = [
            _Node(self.lat_min, self.lon_min, mid_lat, mid_lon, d),
            _Node(self.lat_min, mid_lon, mid_lat, self.lon_max, d),
            _Node(mid_lat, self.lon_min, self.lat_max, mid_lon, d),
            _Node(mid_lat, mid_lon, self.lat_max, self.lon_max, d),
        ]


class Quadtree:
    """Immutable-after-build point index keyed by POI array positions."""

    def __init__(self, lats, lons, ids, capacity: int = 64, max_depth: int = 12,
                 bounds: tuple | None = None):
        if capacity < 1 or max_depth < 0:
            raise ValueError("capacity must be >= 1 and max_depth >= 0")
        self.lats = np.asarray(lats, dtype=float)
        self.lons = np.asarray(lons, dtype=float)
        self.ids = list(ids)
        self.capacity = capacity
        self.max_depth = max_depth
        if bounds is None:
            if len(self.lats):
                pad = 1e-9
                bounds = (self.lats.min() - pad, self.lons.min() - pad,
                          self.lats.max() + pad, self.lons.max() + pad)
            else:
                bounds = (-90.0, -180.0, 90.0, 180.0)
        self.root = _Node(*bounds, depth=0)
        for i in range(len(self.lats)):
            self._insert(i)

    def _insert(self, i: int) -> None:
        lat, lon = self.lats[i], self.lons[i]
        node = self.root
        if not (node.lat_min <= lat <= node.lat_max and node.lon_min <= lon <= node.lon_max):
            raise IngestError(f"POI {self.ids[i]!r} at ({lat}, {lon}) outside the index bounds")
        while node.children is not None:
            node = node.child_for(lat, lon)
        node.items.append(i)
        if len(node.items) > self.capacity and node.depth < self.max_depth:
            items, node.items = node.items, []
            node.split()
            for j in items:
                node.child_for(self.lats[j], self.lons[j]).items.append(j)

    def query_box(self, lat_min, lon_min, lat_max, lon_max) -> np.ndarray:
        """Indices of POIs inside the closed box, in ascending order."""
        found = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if (node.lat_min > lat_max or node.lat_max < lat_min
                    or node.lon_min > lon_max or node.lon_max < lon_min):
                continue
            if node.children is not None:
                stack.extend(node.children)
                continue
            for i in node.items:
                if lat_min <= self.lats[i] <= lat_max and lon_min <= self.lons[i] <= lon_max:
                    found.append(i)
        found.sort()
        return np.array(found, dtype=int)

    def leaf_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.children is None:
                count += 1
            else:
                stack.extend(node.children)
        return count


def build_index(pois, capacity: int = 64, max_depth: int = 12,
                bounds: tuple | None = None) -> Quadtree:
    """Build the offline quadtree for a POI collection."""
    lats = np.array([p.location.lat for p in pois], dtype=float)
    lons = np.array([p.location.lon for p in pois], dtype=float)
    ids = [p.id for p in pois]
    return Quadtree(lats, lons, ids, capacity=capacity, max_depth=max_depth, bounds=bounds)


def match_points(roi, index: Quadtree, v: Viewport) -> MatchedSet:
    """POIs whose projected screen location lies inside or on the ROI polygon.

    The quadtree prunes to the ROI's geographic bounding box; the survivors
    get the exact half-plane containment test in pixel space.
    """
    x_min, y_min, x_max, y_max = roi.polygon.bbox()
    lat_min, lon_min, lat_max, lon_max = screen_bbox_to_geo(x_min, y_min, x_max, y_max, v)
    candidates = index.query_box(lat_min - _QUERY_PAD, lon_min - _QUERY_PAD,
                                 lat_max + _QUERY_PAD, lon_max + _QUERY_PAD)
    if len(candidates) == 0:
        return MatchedSet(roi.roi_id, candidates, set())
    xs, ys = geo_to_screen_xy(index.lats[candidates], index.lons[candidates], v)
    inside = roi.polygon.contains_points(xs, ys)
    matched = candidates[inside]
    return MatchedSet(roi.roi_id, matched, {index.ids[i] for i in matched})


def facet_vector(matched, schema) -> np.ndarray:
    """Binary facet profile of a matched POI set: 1 iff some POI has the value."""
    vec = np.zeros(len(schema), dtype=np.uint8)
    for poi in matched:
        vec |= schema.facet_vector(poi.attributes)
    return vec
