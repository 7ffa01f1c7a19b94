"""Post-run analysis: timing, separation, deadlock/livelock classification."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import ControlParams, Scenario

# A run is "stalled" when every agent moves slower than this fraction of
# the speed limit for the whole trailing window without converging.
DEADLOCK_WINDOW_S = 5.0
DEADLOCK_SPEED_FRACTION = 0.01
LIVELOCK_WINDOW_FRACTION = 0.25


@dataclass(frozen=True)
class RunMetrics:
    transition_time: float | None  # s, None when not converged
    execution_time_ms: float
    min_separation: float
    min_obstacle_clearance: float
    lbt_opt: float
    converged: bool
    deadlock: bool
    livelock: bool
    steps: int
    max_hamiltonian_increase: float


def lbt_opt(starts, goals_assigned, v_max_eff: float) -> float:
    """Straight-line-at-max-speed lower bound on the optimal transition time."""
    if v_max_eff <= 0:
        raise ValueError(f"v_max_eff must be > 0, got {v_max_eff}")
    starts = np.asarray(starts, dtype=np.float64)
    goals = np.asarray(goals_assigned, dtype=np.float64)
    if starts.shape != goals.shape:
        raise ValueError(f"shape mismatch: {starts.shape} vs {goals.shape}")
    delta = goals - starts
    return float(np.max(np.sqrt(np.sum(delta * delta, axis=1)))) / v_max_eff


def min_separation(trajectory):
    """Overall and per-step minimum pairwise distance from logged records.

    Returns (overall_min, per_step_series). Recomputed by brute force from
    the logged positions, independent of the engine's incremental tracker.
    Single-agent runs have no pairs and yield +inf.
    """
    if not trajectory:
        raise ValueError("empty trajectory")
    series = []
    for rec in trajectory:
        pts = np.asarray(rec.positions, dtype=np.float64)
        if len(pts) < 2:
            series.append(float("inf"))
            continue
        iu, ju = np.triu_indices(len(pts), k=1)
        delta = pts[ju] - pts[iu]
        series.append(float(np.min(np.sqrt(np.sum(delta * delta, axis=1)))))
    series = np.asarray(series)
    return float(np.min(series)), series


def detect_deadlock(run, params: ControlParams) -> bool:
    """True iff the run timed out while fully stalled short of the goals.

    Stalled: over the final window every agent's speed stays below 1% of
    the speed limit while the worst goal distance never drops under the
    convergence threshold. Timed-out runs still making progress are not
    deadlocks.
    """
    if run.converged:
        return False
    t = run.series.t
    if len(t) == 0:
        return False
    window = t >= t[-1] - DEADLOCK_WINDOW_S
    slow = run.series.max_speed[window] < DEADLOCK_SPEED_FRACTION * params.v_max_eff
    short = run.series.max_goal_distance[window] >= params.end_max_dis
    return bool(np.all(slow) and np.all(short))


def detect_livelock(run, params: ControlParams) -> bool:
    """True iff the run keeps moving without progress: not converged, not
    deadlocked, and the worst goal distance never improves over the final
    quarter of the run."""
    if run.converged or detect_deadlock(run, params):
        return False
    goal = run.series.max_goal_distance
    if len(goal) < 2:
        return False
    start = int(len(goal) * (1.0 - LIVELOCK_WINDOW_FRACTION))
    tail = goal[start:]
    return bool(np.all(np.diff(tail) >= -1e-9))


def summarize(run, scenario: Scenario, params: ControlParams) -> RunMetrics:
    """Aggregate one finished run; pure function of the run's log."""
    starts = np.asarray(scenario.starts, dtype=np.float64)
    lbt = lbt_opt(starts, run.targets, params.v_max_eff)
    h = run.series.hamiltonian
    max_h_increase = float(np.max(np.diff(h))) if len(h) > 1 else 0.0
    return RunMetrics(
        transition_time=run.transition_time,
        execution_time_ms=run.execution_time_ms,
        min_separation=float(np.min(run.series.min_separation)),
        min_obstacle_clearance=float(np.min(run.series.min_obstacle_clearance)),
        lbt_opt=lbt,
        converged=run.converged,
        deadlock=detect_deadlock(run, params),
        livelock=detect_livelock(run, params),
        steps=run.steps,
        max_hamiltonian_increase=max(max_h_increase, 0.0),
    )


def metrics_to_dict(m: RunMetrics) -> dict:
    return asdict(m)
