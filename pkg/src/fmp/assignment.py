"""One-to-one agent-to-goal assignment minimizing total travel distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class Assignment:
    """A bijection agent index -> goal index with its total distance."""

    perm: tuple[int, ...]
    total_cost: float


def _check_perm(perm, n: int) -> None:
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm is not a permutation of 0..{n - 1}: {perm}")


def assignment_cost(starts, goals, perm) -> float:
    """Total Euclidean distance when agent i travels to goals[perm[i]]."""
    starts = np.asarray(starts, dtype=np.float64)
    goals = np.asarray(goals, dtype=np.float64)
    if starts.shape != goals.shape:
        raise ValueError(f"shape mismatch: {starts.shape} vs {goals.shape}")
    _check_perm(perm, len(starts))
    return float(
        sum(np.linalg.norm(goals[perm[i]] - starts[i]) for i in range(len(starts)))
    )


def hungarian_assign(starts, goals) -> Assignment:
    """Minimum-total-distance assignment via the Hungarian method (O(n^3)).

    Among equal-cost assignments the solver's internal deterministic order
    decides; only the cost is unique.
    """
    starts = np.asarray(starts, dtype=np.float64)
    goals = np.asarray(goals, dtype=np.float64)
    if len(starts) == 0:
        raise ValueError("empty assignment instance")
    if starts.shape != goals.shape:
        raise ValueError(f"shape mismatch: {starts.shape} vs {goals.shape}")
    cost = np.linalg.norm(starts[:, None, :] - goals[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = tuple(int(c) for c in cols[np.argsort(rows)])
    return Assignment(perm=perm, total_cost=assignment_cost(starts, goals, perm))
