"""Neighbor-pair search backends.

Both backends return the identical, lexicographically sorted list of
agent pairs closer than the interaction radius, with distances recomputed
in numpy so results are bitwise independent of the backend. The brute
backend scans all O(n^2) pairs; the accelerated backend prunes candidates
with a k-d tree and is near-linear for short-range interactions.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

# Below this agent count the full scan is at least as fast as tree builds.
BRUTE_FORCE_LIMIT = 256


def pair_distances(points: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    delta = points[j] - points[i]
    return np.sqrt(np.sum(delta * delta, axis=1))


def _sort_pairs(i: np.ndarray, j: np.ndarray):
    order = np.lexsort((j, i))
    return i[order], j[order]


def brute_force_pairs(points: np.ndarray, radius: float):
    """All pairs (i < j) with distance strictly below radius, sorted."""
    n = len(points)
    iu, ju = np.triu_indices(n, k=1)
    dist = pair_distances(points, iu, ju)
    mask = dist < radius
    i, j = _sort_pairs(iu[mask], ju[mask])
    return i, j, pair_distances(points, i, j)


def tree_pairs(points: np.ndarray, radius: float):
    """Same contract as brute_force_pairs, via a k-d tree."""
    tree = cKDTree(points)
    # Inflated query radius guards against the tree's own rounding of the
    # boundary; the strict < cut below uses the numpy distances.
    pairs = tree.query_pairs(radius * (1.0 + 1e-12), output_type="ndarray")
    if len(pairs) == 0:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty, np.empty(0, dtype=np.float64)
    i = np.minimum(pairs[:, 0], pairs[:, 1])
    j = np.maximum(pairs[:, 0], pairs[:, 1])
    dist = pair_distances(points, i, j)
    mask = dist < radius
    i, j = _sort_pairs(i[mask], j[mask])
    return i, j, pair_distances(points, i, j)


def neighbor_pairs(points: np.ndarray, radius: float, mode: str = "auto"):
    """Dispatch to a backend; "auto" picks by agent count."""
    if mode == "auto":
        mode = "brute" if len(points) < BRUTE_FORCE_LIMIT else "tree"
    if mode == "brute":
        return brute_force_pairs(points, radius)
    if mode == "tree":
        return tree_pairs(points, radius)
    raise ValueError(f"unknown neighbor mode {mode!r}")


def min_pairwise_distance(points: np.ndarray, mode: str = "auto") -> float:
    """Exact minimum pairwise distance; +inf for fewer than two points."""
    n = len(points)
    if n < 2:
        return float("inf")
    if mode == "auto":
        mode = "brute" if n < BRUTE_FORCE_LIMIT else "tree"
    if mode == "brute":
        iu, ju = np.triu_indices(n, k=1)
        return float(np.min(pair_distances(points, iu, ju)))
    tree = cKDTree(points)
    _, idx = tree.query(points, k=2)
    nearest = idx[:, 1]
    return float(np.min(pair_distances(points, np.arange(n), nearest)))
