"""Selection of few, relevant, mutually diverse POIs per region.

Two selectors share the same relevance notion (cosine between a POI's binary
facet vector and the softmax feedback view). The greedy selector works one
region at a time, swapping candidates into the working set whenever that
strictly raises pairwise diversity. The fuzzy selector processes all regions
at once with fuzzy memberships over a composite facet+spatial distance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

DIVERSITY_TOL = 1e-12


def unit_rows(mat: np.ndarray) -> np.ndarray:
    """L2-normalize matrix rows; all-zero rows stay zero."""
    mat = np.asarray(mat, dtype=float)
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return mat / norms


def relevance_scores(facet_mat: np.ndarray, fnorm: np.ndarray) -> np.ndarray:
    """Cosine of every POI facet row against the normalized feedback vector."""
    fn = np.linalg.norm(fnorm)
    if fn == 0.0:
        return np.zeros(len(facet_mat))
    return unit_rows(facet_mat) @ (fnorm / fn)


def pairwise_diversity(facet_vectors) -> float:
    """Sum of (1 - cosine) over unordered pairs of facet vectors."""
    mat = np.asarray(facet_vectors, dtype=float)
    n = len(mat)
    if n < 2:
        return 0.0
    unit = unit_rows(mat)
    sims = unit @ unit.T
    total_sim = (sims.sum() - np.trace(sims)) / 2.0
    return float(n * (n - 1) / 2.0 - total_sim)


@dataclass
class GreedySelection:
    """Outcome of one greedy run, with the audit trail tests need."""

    poi_ids: list
    positions: list
    relevances: list
    contributions: list
    diversity_history: list
    scanned: int


def greedy_highlight(poi_ids, facet_mat, fnorm, k_budget: int,
                     similarity_threshold: float = 0.1,
                     time_limit_ms: float | None = 400.0,
                     guard: str = "relevance_bound",
                     max_candidates: int | None = None) -> GreedySelection:
    """Diversity-improving swap scan over relevance-ranked candidates.

    Candidates are ranked by relevance (ties by POI id). The working set
    starts as the top k_budget; each further candidate replaces the first
    incumbent whose removal strictly raises pairwise diversity. The scan ends
    at the time limit, after max_candidates, or at the relevance bound:
    by default once candidate relevance drops below similarity_threshold,
    or in "literal" mode once the candidate's similarity to the top-ranked
    POI exceeds the threshold.
    """
    n = len(poi_ids)
    if n == 0 or k_budget <= 0:
        return GreedySelection([], [], [], [], [], 0)
    if guard not in ("relevance_bound", "literal"):
        raise ValueError(f"unknown guard mode {guard!r}")
    rel = relevance_scores(facet_mat, fnorm)
    order = sorted(range(n), key=lambda i: (-rel[i], poi_ids[i]))
    kp = min(k_budget, n)

    unit = unit_rows(facet_mat)
    selected = list(order[:kp])
    sims = unit[selected] @ unit[selected].T
    n_pairs = kp * (kp - 1) / 2.0
    diversity = float(n_pairs - (sims.sum() - np.trace(sims)) / 2.0)
    history = [diversity]

    # the scan end is fixed by the guard before swaps begin: candidates come
    # in decreasing relevance, so the bound cuts a prefix
    cands = np.array(order[kp:], dtype=int)
    if guard == "relevance_bound":
        below = np.nonzero(rel[cands] < similarity_threshold)[0]
        if len(below):
            cands = cands[: below[0]]
    else:
        p_star_sims = unit[cands] @ unit[order[0]]
        above = np.nonzero(p_star_sims > similarity_threshold)[0]
        if len(above):
            cands = cands[: above[0]]
    if max_candidates is not None:
        cands = cands[:max_candidates]

    start = time.perf_counter()
    limit_s = None if time_limit_ms is None else time_limit_ms / 1000.0
    scanned = 0
    pos = 0
    while pos < len(cands):
        if limit_s is not None and time.perf_counter() - start > limit_s:
            break
        block = cands[pos:]
        cand_mat = unit[block] @ unit[selected].T
        row_sums = sims.sum(axis=1) - np.diag(sims)
        # replacing incumbent q with candidate c changes summed similarity by
        # (sum_sims(c) - sim(c, q)) - row_sums[q]; diversity moves opposite
        gains = row_sums[None, :] - (cand_mat.sum(axis=1)[:, None] - cand_mat)
        improving = np.nonzero((gains > DIVERSITY_TOL).any(axis=1))[0]
        if len(improving) == 0:
            scanned += len(block)
            break
        r = int(improving[0])
        q = int(np.nonzero(gains[r] > DIVERSITY_TOL)[0][0])
        c = int(block[r])
        scanned += r + 1
        pos += r + 1
        selected[q] = c
        new_row = unit[selected] @ unit[c]
        sims[q, :] = new_row
        sims[:, q] = new_row
        diversity += float(gains[r, q])
        history.append(diversity)

    if kp > 1:
        # mean dissimilarity of each kept POI to the rest of the set
        contributions = [float((kp - 1 - (sims[i].sum() - sims[i, i])) / (kp - 1))
                         for i in range(kp)]
    else:
        contributions = [0.0] * kp
    return GreedySelection(
        poi_ids=[poi_ids[i] for i in selected],
        positions=selected,
        relevances=[float(rel[i]) for i in selected],
        contributions=contributions,
        diversity_history=history,
        scanned=scanned,
    )


@dataclass
class FuzzyRoi:
    """One region's inputs to the pooled fuzzy run."""

    roi_id: str
    centroid_xy: np.ndarray
    member_rows: np.ndarray
    k_budget: int


@dataclass
class FuzzyResult:
    """Converged fuzzy state plus the per-region selections."""

    selections: dict
    memberships: np.ndarray
    centroid_xy: np.ndarray
    centroid_profiles: np.ndarray
    objective_history: list
    row_sum_errors: list
    iterations: int
    converged: bool


def _fuzzy_memberships(dist: np.ndarray) -> np.ndarray:
    """Row-stochastic memberships for fuzzifier 2: proportional to 1/d^2."""
    u = np.zeros_like(dist)
    zero = dist < 1e-12
    has_zero = zero.any(axis=1)
    if has_zero.any():
        z = zero[has_zero].astype(float)
        u[has_zero] = z / z.sum(axis=1, keepdims=True)
    rest = ~has_zero
    if rest.any():
        inv = 1.0 / np.square(dist[rest])
        u[rest] = inv / inv.sum(axis=1, keepdims=True)
    return u


def fuzzy_highlight(rois: list[FuzzyRoi], poi_ids, facet_mat, screen_xy, fnorm,
                    weights=(0.5, 0.25, 0.25), tol: float = 1e-4,
                    max_iters: int = 100) -> FuzzyResult:
    """Joint fuzzy assignment of pooled POIs to one centroid per region.

    Centroids carry a pixel position (seeded at the region's polygon centroid)
    and a facet profile (seeded at the mean profile of the region's matched
    POIs). The composite POI-to-centroid distance is

        w1 * (1 - relevance) + w2 * (1 - profile cosine) + w3 * spatial / D

    with D the diagonal of the pooled bounding box. Centroids move to the
    membership^2-weighted means; a move is only kept if the composite score
    (w1 * relevance + w2 * cohesiveness + w3 * centroid spread) does not drop,
    so the recorded objective is non-decreasing by construction. Each POI is
    finally owned by its highest-membership centroid (no duplicates across
    regions) and each region lists its top k_budget owned POIs by membership,
    breaking ties by relevance and then POI id.
    """
    w1, w2, w3 = (float(w) for w in weights)
    if abs(w1 + w2 + w3 - 1.0) > 1e-9 or min(w1, w2, w3) < 0:
        raise ValueError(f"weights must be non-negative and sum to 1, got {weights}")
    n = len(poi_ids)
    c = len(rois)
    if n == 0 or c == 0:
        return FuzzyResult({r.roi_id: [] for r in rois}, np.zeros((0, c)),
                           np.zeros((c, 2)), np.zeros((c, 0)), [], [], 0, True)

    facet_mat = np.asarray(facet_mat, dtype=float)
    screen_xy = np.asarray(screen_xy, dtype=float)
    rel = relevance_scores(facet_mat, fnorm)
    unit = unit_rows(facet_mat)

    positions = np.array([r.centroid_xy for r in rois], dtype=float)
    profiles = np.zeros((c, facet_mat.shape[1]))
    for j, r in enumerate(rois):
        if len(r.member_rows):
            profiles[j] = facet_mat[r.member_rows].mean(axis=0)

    all_xy = np.vstack([screen_xy, positions])
    span = all_xy.max(axis=0) - all_xy.min(axis=0)
    diag = float(np.hypot(span[0], span[1]))
    diag = diag if diag > 1e-9 else 1.0

    def distances(pos, prof):
        cos_mat = unit @ unit_rows(prof).T
        spatial = np.linalg.norm(screen_xy[:, None, :] - pos[None, :, :], axis=2)
        return w1 * (1.0 - rel)[:, None] + w2 * (1.0 - cos_mat) + w3 * spatial / diag

    def objective(u, pos, prof):
        w = np.square(u)
        wsum = w.sum()
        r_term = float((w * rel[:, None]).sum() / wsum) if wsum > 0 else 0.0
        owners = np.argmax(u, axis=1)
        prof_unit = unit_rows(prof)
        cohesions = []
        for j in range(c):
            rows = np.nonzero(owners == j)[0]
            if len(rows):
                cohesions.append(float(np.mean(unit[rows] @ prof_unit[j])))
        c_term = float(np.mean(cohesions)) if cohesions else 0.0
        if c >= 2:
            dists = [np.linalg.norm(pos[a] - pos[b]) for a in range(c) for b in range(a + 1, c)]
            p_term = float(np.mean(dists)) / diag
        else:
            p_term = 0.0
        return w1 * r_term + w2 * c_term + w3 * p_term

    history = []
    row_sum_errors = []
    iterations = 0
    converged = False
    for _ in range(max_iters):
        u = _fuzzy_memberships(distances(positions, profiles))
        row_sum_errors.append(float(np.max(np.abs(u.sum(axis=1) - 1.0))))
        weights_sq = np.square(u)
        mass = weights_sq.sum(axis=0)
        new_positions = positions.copy()
        new_profiles = profiles.copy()
        nonzero = mass > 0
        new_positions[nonzero] = (weights_sq.T[nonzero] @ screen_xy) / mass[nonzero, None]
        new_profiles[nonzero] = (weights_sq.T[nonzero] @ facet_mat) / mass[nonzero, None]
        score = objective(u, new_positions, new_profiles)
        if history and score < history[-1] - 1e-12:
            converged = True
            break
        iterations += 1
        history.append(score)
        displacement = max(
            float(np.linalg.norm(new_positions[j] - positions[j])
                  + np.linalg.norm(new_profiles[j] - profiles[j]))
            for j in range(c)
        )
        positions, profiles = new_positions, new_profiles
        if displacement < tol:
            converged = True
            break

    memberships = _fuzzy_memberships(distances(positions, profiles))
    row_sum_errors.append(float(np.max(np.abs(memberships.sum(axis=1) - 1.0))))
    owners = np.argmax(memberships, axis=1)
    selections = {}
    for j, r in enumerate(rois):
        rows = np.nonzero(owners == j)[0]
        ranked = sorted(rows, key=lambda i: (-memberships[i, j], -rel[i], poi_ids[i]))
        chosen = ranked[: max(0, r.k_budget)]
        selections[r.roi_id] = [
            {"poi_id": poi_ids[i], "relevance": float(rel[i]),
             "membership": float(memberships[i, j])}
            for i in chosen
        ]
    return FuzzyResult(selections, memberships, positions, profiles,
                       history, row_sum_errors, iterations, converged)


def choose_algorithm(policy: str, conf: float) -> str:
    """Resolve the configured policy to a concrete selector for this pass."""
    if policy in ("greedy", "fuzzy"):
        return policy
    if policy == "auto":
        return "greedy" if conf < 0.5 else "fuzzy"
    raise ValueError(f"unknown highlight policy {policy!r}")
