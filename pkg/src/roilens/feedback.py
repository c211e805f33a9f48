"""Facet-based preference vector learned from matched POIs.

Every POI attribute value is a facet; the feedback vector accumulates a raw
non-negative weight per facet and is read through a softmax view. The raw
accumulator only ever grows, which keeps the learned state transparent: the
user can always see which facets drew their attention and by how much.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class PeculiarityMode(str, Enum):
    """How unexplored-ness of a region is scored against the feedback vector.

    INVERSE (default): one minus the cosine to the region's facet profile, so
    regions the user has already covered score near zero and barely get
    highlights. DIRECT keeps the raw cosine similarity instead.
    """

    INVERSE = "inverse_cosine"
    DIRECT = "cosine"


class FacetSchema:
    """Ordered attribute domains with a flat facet index.

    Facet i corresponds to one (attribute, value) pair; the flat layout is
    shared by the feedback vector and every POI facet vector.
    """

    def __init__(self, attributes):
        self.attributes = [(a, tuple(dom)) for a, dom in attributes]
        self._index = {}
        self.labels = []
        for attr, dom in self.attributes:
            for value in dom:
                key = (attr, value)
                if key in self._index:
                    raise ValueError(f"duplicate facet {attr}={value}")
                self._index[key] = len(self.labels)
                self.labels.append(f"{attr}={value}")

    def __len__(self):
        return len(self.labels)

    def index_of(self, attr: str, value: str) -> int:
        return self._index[(attr, value)]

    def facet_vector(self, attributes: dict) -> np.ndarray:
        """Binary vector with a 1 for each facet the attribute dict carries."""
        vec = np.zeros(len(self.labels), dtype=np.uint8)
        for attr, value in attributes.items():
            idx = self._index.get((attr, value))
            if idx is None:
                raise KeyError(f"facet {attr}={value} not in schema")
            vec[idx] = 1
        return vec


@dataclass
class FeedbackVector:
    """Per-facet preference accumulator plus the session interaction count."""

    schema: FacetSchema
    raw: np.ndarray = None
    interaction_count: int = 0

    def __post_init__(self):
        if self.raw is None:
            self.raw = np.zeros(len(self.schema), dtype=float)
        if np.any(self.raw < 0):
            raise ValueError("raw feedback weights must be non-negative")

    def nnz(self) -> int:
        return int(np.count_nonzero(self.raw > 0))

    def add_raw(self, increments: np.ndarray) -> None:
        """Accumulate pre-summed per-facet increments (vectorized update path)."""
        if np.any(increments < 0):
            raise ValueError("feedback is incremental; negative updates rejected")
        self.raw += increments

    def raw_view(self) -> dict:
        return {label: float(w) for label, w in zip(self.schema.labels, self.raw)}

    def normalized_view(self) -> dict:
        return {label: float(w) for label, w in zip(self.schema.labels, normalized(self))}


def update(f: FeedbackVector, matched, delta: float) -> FeedbackVector:
    """Raise the weight of every facet carried by every matched POI by delta."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    for poi in matched:
        for attr, value in poi.attributes.items():
            f.raw[f.schema.index_of(attr, value)] += delta
    return f


def normalized(f: FeedbackVector) -> np.ndarray:
    """Softmax view of the raw accumulator: strictly positive, sums to one."""
    shifted = f.raw - f.raw.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def confidence(f: FeedbackVector, interactions: int | None = None, xi: float = 7.0) -> float:
    """Richness of the feedback relative to the interaction count, capped at 1.

    Counts strictly positive raw cells (the softmax view is positive
    everywhere, so sparsity only exists on the raw accumulator). Zero
    interactions means no evidence yet: confidence 0.
    """
    if xi <= 0:
        raise ValueError(f"xi must be > 0, got {xi}")
    t = f.interaction_count if interactions is None else interactions
    if t <= 0:
        return 0.0
    return min(1.0, f.nnz() / (xi * t))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity with the zero-vector convention cos(u, 0) = 0."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def peculiarity(f: FeedbackVector, facet_vec: np.ndarray,
                mode: PeculiarityMode = PeculiarityMode.INVERSE) -> float:
    """Score how unexplored a region's facet profile is, in [0, 1].

    Uses the softmax view of the feedback vector. A region with no facets at
    all is fully unexplored (1.0 in INVERSE mode).
    """
    mode = PeculiarityMode(mode)
    vec = np.asarray(facet_vec, dtype=float)
    if not np.any(vec):
        return 1.0 if mode is PeculiarityMode.INVERSE else 0.0
    sim = cosine(normalized(f), vec)
    sim = min(1.0, max(0.0, sim))
    return 1.0 - sim if mode is PeculiarityMode.INVERSE else sim


def budget(k: int, pec: float) -> int:
    """Peculiarity-scaled highlight budget: floor(k * pec), at least 1 when pec > 0."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not 0.0 <= pec <= 1.0:
        raise ValueError(f"peculiarity must be in [0, 1], got {pec}")
    if pec == 0.0:
        return 0
    return max(1, math.floor(k * pec))
