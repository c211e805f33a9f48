"""Independent brute-force oracles the implementation is checked against.

Nothing here shares code with the package's algorithmic paths: hulls come
from an O(n^3) half-plane scan, clustering from a full distance matrix with
union-find, matching from an exhaustive projection scan, areas from Monte
Carlo sampling, and the greedy bound from exhaustive subset enumeration.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def brute_force_hull(points: np.ndarray) -> np.ndarray:
    """O(n^3) convex hull for points in general position, CCW by angle."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    vertices = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ex, ey = pts[j] - pts[i]
            cross = ex * (pts[:, 1] - pts[i, 1]) - ey * (pts[:, 0] - pts[i, 0])
            mask = np.ones(n, dtype=bool)
            mask[[i, j]] = False
            if np.all(cross[mask] > 0):
                vertices.add(i)
                vertices.add(j)
    verts = pts[sorted(vertices)]
    center = verts.mean(axis=0)
    angles = np.arctan2(verts[:, 1] - center[1], verts[:, 0] - center[0])
    return verts[np.argsort(angles)]


def canonical_ring(vertices: np.ndarray) -> np.ndarray:
    """Rotate a CCW ring to start at its lowest-then-leftmost vertex."""
    verts = np.asarray(vertices, dtype=float)
    start = min(range(len(verts)), key=lambda i: (verts[i][1], verts[i][0]))
    return np.roll(verts, -start, axis=0)


def dbscan_oracle(coords: np.ndarray, eps: float, min_pts: int):
    """Density clustering from the full distance matrix.

    Core points: strictly-within-eps neighborhood (self included) of at least
    min_pts points. Clusters are connected components of core points under
    eps-adjacency, numbered by their smallest member index; a border point
    joins the lowest-numbered cluster that has a core point within eps.
    Returns (labels, core_mask); noise keeps label -1.
    """
    pts = np.asarray(coords, dtype=float)
    n = len(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    adj = dist < eps
    core = adj.sum(axis=1) >= min_pts

    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        if not core[i]:
            continue
        for j in np.nonzero(adj[i] & core)[0]:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    components = {}
    for i in range(n):
        if core[i]:
            components.setdefault(find(i), []).append(i)
    ordered = sorted(components.values(), key=lambda members: members[0])

    labels = np.full(n, -1, dtype=int)
    for cid, members in enumerate(ordered):
        labels[members] = cid
    for i in range(n):
        if core[i]:
            continue
        neighbor_clusters = sorted({int(labels[j]) for j in np.nonzero(adj[i])[0]
                                    if core[j]})
        if neighbor_clusters:
            labels[i] = neighbor_clusters[0]
    return labels, core


def naive_match(polygon_vertices, lats, lons, gamma, theta, scale) -> np.ndarray:
    """Exhaustive projected point-in-polygon scan; closed boundary, tol 1e-9."""
    cosg = math.cos(math.radians(gamma))
    xs = (np.asarray(lons) - theta) * cosg / scale
    ys = (np.asarray(lats) - gamma) / scale
    inside = np.ones(len(xs), dtype=bool)
    verts = np.asarray(polygon_vertices, dtype=float)
    for i in range(len(verts)):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % len(verts)]
        inside &= (bx - ax) * (ys - ay) - (by - ay) * (xs - ax) >= -1e-9
    return np.nonzero(inside)[0]


def mc_area(vertices_a, vertices_b, n_samples: int, rng) -> float:
    """Monte Carlo estimate of the intersection area of two convex polygons."""
    a = np.asarray(vertices_a, dtype=float)
    b = np.asarray(vertices_b, dtype=float)
    lo = np.maximum(a.min(axis=0), b.min(axis=0))
    hi = np.minimum(a.max(axis=0), b.max(axis=0))
    if np.any(hi <= lo):
        return 0.0
    samples = rng.uniform(lo, hi, size=(n_samples, 2))

    def inside(poly, pts):
        ok = np.ones(len(pts), dtype=bool)
        for i in range(len(poly)):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % len(poly)]
            ok &= (bx - ax) * (pts[:, 1] - ay) - (by - ay) * (pts[:, 0] - ax) >= 0
        return ok

    frac = np.mean(inside(a, samples) & inside(b, samples))
    box_area = float(np.prod(hi - lo))
    return float(frac) * box_area


def shoelace(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    return abs(float((v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]).sum())) / 2.0


def pair_diversity(rows: np.ndarray) -> float:
    """Direct pair enumeration of sum(1 - cosine); zero rows count cosine 0."""
    total = 0.0
    n = len(rows)
    for i in range(n):
        for j in range(i + 1, n):
            u, v = rows[i].astype(float), rows[j].astype(float)
            nu, nv = np.linalg.norm(u), np.linalg.norm(v)
            cos = float(u @ v / (nu * nv)) if nu > 0 and nv > 0 else 0.0
            total += 1.0 - cos
    return total


def exhaustive_best_diversity(facet_rows, relevances, poi_ids, size: int,
                              threshold: float) -> float:
    """Max diversity over all size-subsets meeting the relevance bound.

    A POI is eligible if its relevance clears the threshold or it sits in the
    initial top-`size` of the (relevance desc, id asc) ranking.
    """
    order = sorted(range(len(poi_ids)), key=lambda i: (-relevances[i], poi_ids[i]))
    initial = set(order[:size])
    eligible = [i for i in range(len(poi_ids))
                if relevances[i] >= threshold or i in initial]
    best = 0.0
    for combo in itertools.combinations(eligible, size):
        best = max(best, pair_diversity(facet_rows[list(combo)]))
    return best


def reference_fcm_memberships(dist: np.ndarray) -> np.ndarray:
    """Plain-loop fuzzy memberships for fuzzifier 2: u_ij = 1 / sum_k (d_ij/d_ik)^2."""
    n, c = dist.shape
    u = np.zeros((n, c))
    for i in range(n):
        zeros = [j for j in range(c) if dist[i, j] < 1e-12]
        if zeros:
            for j in zeros:
                u[i, j] = 1.0 / len(zeros)
            continue
        for j in range(c):
            u[i, j] = 1.0 / sum((dist[i, j] / dist[i, k]) ** 2 for k in range(c))
    return u
