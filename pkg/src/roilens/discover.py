"""Region-of-interest discovery over segmented mouse traces.

Each segment is density-clustered in pixel space, every cluster is reduced to
its convex hull (after extreme-quadrilateral pruning), hulls are expanded in
proportion to the session confidence, and hulls from *different* segments are
pairwise intersected. The non-empty intersections are the ROIs: a region the
user kept returning to across time.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .feedback import confidence
from .geo import RoilensError

logger = logging.getLogger(__name__)

AREA_EPS = 1e-9  # px^2; zero-area touching counts as no intersection
COLLINEAR_EPS = 1e-9


class DegenerateClusterError(RoilensError):
    """Cluster has no 2D extent: fewer than 3 distinct points, or all collinear."""


@dataclass
class Cluster:
    """Density cluster of one segment; points kept in lexicographic (x, y, t) order."""

    segment_index: int
    points: list


class ConvexPolygon:
    """Simple convex polygon in pixel space.

    Vertices are stored counter-clockwise with no three consecutive collinear,
    starting from the lowest (then leftmost) vertex so equal polygons compare
    vertex-by-vertex.
    """

    __slots__ = ("vertices", "_area", "_centroid")

    def __init__(self, vertices):
        arr = np.asarray(vertices, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
            raise DegenerateClusterError("polygon needs at least 3 vertices")
        if _signed_area(arr) < 0:
            arr = arr[::-1]
        arr = _strip_collinear(arr)
        if arr is None or _signed_area(arr) <= AREA_EPS:
            raise DegenerateClusterError("polygon has no area")
        self.vertices = _rotate_to_start(arr)
        self._area = None
        self._centroid = None

    @property
    def area(self) -> float:
        if self._area is None:
            self._area = _signed_area(self.vertices)
        return self._area

    @property
    def centroid(self) -> np.ndarray:
        """Area centroid of the polygon."""
        if self._centroid is None:
            v = self.vertices
            w = np.roll(v, -1, axis=0)
            cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
            a = cross.sum() / 2.0
            cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * a)
            cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * a)
            self._centroid = np.array([cx, cy])
        return self._centroid

    def bbox(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max)."""
        mins = self.vertices.min(axis=0)
        maxs = self.vertices.max(axis=0)
        return mins[0], mins[1], maxs[0], maxs[1]

    def contains_points(self, xs, ys, tol: float = 1e-9):
        """Closed containment test for arrays of points; boundary counts as inside."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        inside = np.ones(xs.shape, dtype=bool)
        v = self.vertices
        for i in range(len(v)):
            ax, ay = v[i]
            bx, by = v[(i + 1) % len(v)]
            cross = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
            inside &= cross >= -tol
        return inside

    def contains_point(self, x: float, y: float, tol: float = 1e-9) -> bool:
        return bool(self.contains_points(np.array([x]), np.array([y]), tol)[0])

    def __eq__(self, other):
        return (isinstance(other, ConvexPolygon)
                and self.vertices.shape == other.vertices.shape
                and np.allclose(self.vertices, other.vertices, atol=1e-9))

    def __repr__(self):
        return f"ConvexPolygon({len(self.vertices)} vertices, area={self.area:.2f})"


@dataclass
class ROI:
    """Convex region confirmed by hulls from two different segments."""

    roi_id: str
    polygon: ConvexPolygon
    source: tuple
    area: float = field(init=False)

    def __post_init__(self):
        self.area = self.polygon.area


def _signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    return float((v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]).sum() / 2.0)


def _strip_collinear(vertices):
    """Drop duplicate and collinear-interior vertices from a CCW ring."""
    out = []
    n = len(vertices)
    for i in range(n):
        p = vertices[i]
        if out and abs(out[-1][0] - p[0]) < COLLINEAR_EPS and abs(out[-1][1] - p[1]) < COLLINEAR_EPS:
            continue
        out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) < COLLINEAR_EPS and abs(out[0][1] - out[-1][1]) < COLLINEAR_EPS:
        out.pop()
    if len(out) < 3:
        return None
    kept = []
    m = len(out)
    for i in range(m):
        a = out[(i - 1) % m]
        b = out[i]
        c = out[(i + 1) % m]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if cross > COLLINEAR_EPS:
            kept.append(b)
    if len(kept) < 3:
        return None
    return np.array(kept)


def _rotate_to_start(vertices):
    """Rotate the ring so it starts at the lowest-then-leftmost vertex."""
    start = min(range(len(vertices)), key=lambda i: (vertices[i][1], vertices[i][0]))
    return np.roll(vertices, -start, axis=0)


def st_dbscan(seg, eps: float, min_pts: int) -> list[Cluster]:
    """Density clustering of one segment's points in 2D pixel space.

    Direct reachability uses strict Euclidean distance < eps; a point is core
    when its neighborhood (itself included) holds at least min_pts points.
    Clusters are the connected components of the core points, numbered by
    their lexicographically smallest member, and a border point reachable from
    several clusters joins the lowest-numbered one (the first that would reach
    it in a seed-ordered expansion). Noise is dropped.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    pts = sorted(seg.points, key=lambda p: (p.x, p.y, p.t))
    n = len(pts)
    if n == 0:
        return []
    coords = np.array([(p.x, p.y) for p in pts], dtype=float)

    pairs = cKDTree(coords).query_pairs(r=eps, output_type="ndarray")
    if len(pairs):
        delta = coords[pairs[:, 0]] - coords[pairs[:, 1]]
        pairs = pairs[(delta ** 2).sum(axis=1) < eps * eps]
    degree = (np.bincount(pairs[:, 0], minlength=n)
              + np.bincount(pairs[:, 1], minlength=n))
    core = degree + 1 >= min_pts
    labels = np.full(n, -1, dtype=int)
    if core.any():
        core_idx = np.nonzero(core)[0]
        remap = np.full(n, -1, dtype=int)
        remap[core_idx] = np.arange(len(core_idx))
        both_core = core[pairs[:, 0]] & core[pairs[:, 1]]
        cc = pairs[both_core]
        graph = coo_matrix(
            (np.ones(len(cc), dtype=np.int8), (remap[cc[:, 0]], remap[cc[:, 1]])),
            shape=(len(core_idx), len(core_idx)))
        n_comp, comp = connected_components(graph, directed=False)
        # components renumbered by first appearance over lex-ordered core points
        _, first_seen = np.unique(comp, return_index=True)
        rank = np.argsort(np.argsort(first_seen))
        labels[core_idx] = rank[comp]

        sentinel = n_comp + 1
        border_best = np.full(n, sentinel, dtype=int)
        a, b = pairs[:, 0], pairs[:, 1]
        a_border = ~core[a] & core[b]
        b_border = core[a] & ~core[b]
        np.minimum.at(border_best, a[a_border], labels[b[a_border]])
        np.minimum.at(border_best, b[b_border], labels[a[b_border]])
        is_border = ~core & (border_best < sentinel)
        labels[is_border] = border_best[is_border]

    clusters = []
    order = np.argsort(labels, kind="stable")
    start = np.searchsorted(labels[order], 0)
    grouped = order[start:]
    if len(grouped):
        boundaries = np.nonzero(np.diff(labels[grouped]))[0] + 1
        for chunk in np.split(grouped, boundaries):
            members = [pts[i] for i in sorted(chunk)]
            clusters.append(Cluster(seg.index, members))
    return clusters


def akl_toussaint_filter(c: Cluster) -> Cluster:
    """Drop points strictly inside the quadrilateral of the four axis extremes.

    The convex hull of the result equals the hull of the input, so this is a
    pure speed-up for hull construction.
    """
    if len(c.points) <= 4:
        return Cluster(c.segment_index, list(c.points))
    coords = np.array([(p.x, p.y) for p in c.points], dtype=float)
    # ties spread around the ring (min-y prefers max-x, max-y prefers min-x)
    # so axis-aligned inputs still yield a full quadrilateral
    by_x = np.lexsort((coords[:, 1], coords[:, 0]))
    by_y = np.lexsort((-coords[:, 0], coords[:, 1]))
    extremes = [int(by_x[0]), int(by_x[-1]), int(by_y[0]), int(by_y[-1])]
    quad = []
    for i in extremes:
        p = tuple(coords[i])
        if p not in quad:
            quad.append(p)
    if len(quad) < 3:
        return Cluster(c.segment_index, list(c.points))
    quad_arr = np.array(quad)
    if _signed_area(quad_arr) < 0:
        quad_arr = quad_arr[::-1]
    order = _ccw_order(quad_arr)
    if order is None:
        return Cluster(c.segment_index, list(c.points))

    strictly_inside = np.ones(len(coords), dtype=bool)
    m = len(order)
    for i in range(m):
        ax, ay = order[i]
        bx, by = order[(i + 1) % m]
        cross = (bx - ax) * (coords[:, 1] - ay) - (by - ay) * (coords[:, 0] - ax)
        strictly_inside &= cross > COLLINEAR_EPS
    kept = [p for p, drop in zip(c.points, strictly_inside) if not drop]
    return Cluster(c.segment_index, kept)


def _ccw_order(points):
    """Order up to 4 points CCW around their mean; None if they are collinear."""
    center = points.mean(axis=0)
    ang = np.arctan2(points[:, 1] - center[1], points[:, 0] - center[0])
    ordered = points[np.argsort(ang)]
    if abs(_signed_area(ordered)) < COLLINEAR_EPS:
        return None
    if _signed_area(ordered) < 0:
        ordered = ordered[::-1]
    return ordered


def convex_hull(c: Cluster) -> ConvexPolygon:
    """Monotone-chain convex hull of a cluster.

    Cluster points arrive lexicographically sorted from the clustering step,
    which keeps the scan linear. Raises DegenerateClusterError when the points
    have no 2D extent; the discovery pipeline skips such clusters.
    """
    seen = set()
    pts = []
    for p in c.points:
        key = (p.x, p.y)
        if key not in seen:
            seen.add(key)
            pts.append(key)
    pts.sort()
    if len(pts) < 3:
        raise DegenerateClusterError(f"{len(pts)} distinct points")

    def half(points):
        chain = []
        for p in points:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= COLLINEAR_EPS:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        raise DegenerateClusterError("all points collinear")
    return ConvexPolygon(np.array(ring))


def expand_polygon(o: ConvexPolygon, conf: float) -> ConvexPolygon:
    """Scale a polygon about its centroid so its area grows by (1 + conf).

    conf = 0 keeps the polygon as-is; conf = 1 exactly doubles the area.
    """
    if not 0.0 <= conf <= 1.0:
        raise ValueError(f"confidence must be in [0, 1], got {conf}")
    if conf == 0.0:
        return o
    factor = float(np.sqrt(1.0 + conf))
    c = o.centroid
    return ConvexPolygon(c + factor * (o.vertices - c))


def intersect_polygons(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon | None:
    """Intersection of two convex polygons; None when interiors are disjoint.

    Sutherland-Hodgman clipping of `a` against each edge of `b`. Touching
    boundaries with zero overlap area count as empty.
    """
    output = [tuple(v) for v in a.vertices]
    clip = b.vertices
    m = len(clip)
    for i in range(m):
        if not output:
            return None
        cx1, cy1 = clip[i]
        cx2, cy2 = clip[(i + 1) % m]
        edge_dx, edge_dy = cx2 - cx1, cy2 - cy1
        inp = output
        output = []
        sx, sy = inp[-1]
        s_in = edge_dx * (sy - cy1) - edge_dy * (sx - cx1) >= 0
        for ex, ey in inp:
            e_in = edge_dx * (ey - cy1) - edge_dy * (ex - cx1) >= 0
            if e_in != s_in:
                output.append(_line_cross(sx, sy, ex, ey, cx1, cy1, cx2, cy2))
            if e_in:
                output.append((ex, ey))
            sx, sy, s_in = ex, ey, e_in
    if len(output) < 3:
        return None
    try:
        return ConvexPolygon(np.array(output))
    except DegenerateClusterError:
        return None


def _line_cross(sx, sy, ex, ey, cx1, cy1, cx2, cy2):
    """Intersection of segment (s, e) with the infinite line (c1, c2)."""
    dcx, dcy = cx1 - cx2, cy1 - cy2
    dpx, dpy = sx - ex, sy - ey
    den = dcx * dpy - dcy * dpx
    if abs(den) < 1e-30:
        return (ex, ey)
    n1 = cx1 * cy2 - cy1 * cx2
    n2 = sx * ey - sy * ex
    return ((n1 * dpx - n2 * dcx) / den, (n1 * dpy - n2 * dcy) / den)


def polygons_near_identical(a: ConvexPolygon, b: ConvexPolygon, tol: float = 1.0) -> bool:
    """True when the vertex sets coincide within tol pixels (any rotation)."""
    if len(a.vertices) != len(b.vertices):
        return False
    n = len(a.vertices)
    for shift in range(n):
        rolled = np.roll(b.vertices, -shift, axis=0)
        if np.max(np.abs(a.vertices - rolled)) <= tol:
            return True
    return False


def discover_rois(segments: list, feedback_vec, interactions: int, cfg) -> list[ROI]:
    """Full discovery pass: cluster, prune, hull, expand, cross-intersect.

    Only polygons from different segments are paired; their non-empty
    intersections become ROIs. Near-identical ROIs (vertex sets within one
    pixel) are merged, keeping the first. Fewer than two segments with usable
    polygons yields no ROIs.
    """
    conf = confidence(feedback_vec, interactions, cfg.xi)
    polygons = []
    for seg in segments:
        clusters = st_dbscan(seg, cfg.eps_px, cfg.min_pts)
        for k, cluster in enumerate(clusters, start=1):
            pruned = akl_toussaint_filter(cluster)
            try:
                hull = convex_hull(pruned)
            except DegenerateClusterError as exc:
                logger.debug("segment %d cluster %d skipped: %s", seg.index, k, exc)
                continue
            polygons.append((seg.index, f"s{seg.index}c{k}", expand_polygon(hull, conf)))

    rois = []
    for i in range(len(polygons)):
        seg_i, id_i, poly_i = polygons[i]
        for j in range(i + 1, len(polygons)):
            seg_j, id_j, poly_j = polygons[j]
            if seg_i == seg_j:
                continue
            region = intersect_polygons(poly_i, poly_j)
            if region is None:
                continue
            if any(polygons_near_identical(region, r.polygon) for r in rois):
                continue
            rois.append(ROI(f"roi-{len(rois) + 1}", region, (id_i, id_j)))
    return rois
