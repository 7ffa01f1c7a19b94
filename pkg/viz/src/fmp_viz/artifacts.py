"""Read-only loading of simulator run artifacts.

A run directory contains trajectory.csv (long format: one row per agent
per logged step), metrics.json, and optionally scenario.json. Nothing
here ever writes into the input directory.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

TRAJECTORY_CSV = "trajectory.csv"
METRICS_JSON = "metrics.json"
SCENARIO_JSON = "scenario.json"


class ArtifactError(ValueError):
    """Missing, malformed, or mutually inconsistent input artifacts."""


@dataclass(frozen=True)
class RunData:
    times: np.ndarray  # (steps,)
    positions: np.ndarray  # (steps, n, dim)
    velocities: np.ndarray  # (steps, n, dim)
    metrics: dict
    scenario: dict | None

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def dim(self) -> int:
        return self.positions.shape[2]

    @property
    def d_star(self) -> float | None:
        params = self.metrics.get("params") or {}
        value = params.get("d_star")
        return None if value is None else float(value)

    @property
    def goals(self) -> np.ndarray | None:
        if self.scenario is None or "goals" not in self.scenario:
            return None
        return np.asarray(self.scenario["goals"], dtype=np.float64)

    @property
    def obstacles(self) -> list[tuple[np.ndarray, float]]:
        if self.scenario is None:
            return []
        return [
            (np.asarray(ob["center"], dtype=np.float64), float(ob["radius"]))
            for ob in self.scenario.get("obstacles", [])
        ]


def _read_trajectory(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ArtifactError(f"{path}: empty file") from None
        axes = [c[1:] for c in header if c.startswith("p")]
        dim = len(axes)
        if header[:2] != ["t", "id"] or dim not in (2, 3) or len(header) != 2 + 2 * dim:
            raise ArtifactError(f"{path}: unexpected header {header!r}")
        rows = [(float(r[0]), int(r[1]), [float(x) for x in r[2:]]) for r in reader]
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    n = max(agent for _, agent, _ in rows) + 1
    if len(rows) % n:
        raise ArtifactError(f"{path}: {len(rows)} rows is not a multiple of n={n}")
    steps = len(rows) // n
    times = np.empty(steps)
    positions = np.empty((steps, n, dim))
    velocities = np.empty((steps, n, dim))
    for k in range(steps):
        block = rows[k * n : (k + 1) * n]
        times[k] = block[0][0]
        for t, agent, values in block:
            if t != times[k]:
                raise ArtifactError(f"{path}: ragged step at t={t}")
            positions[k, agent] = values[:dim]
            velocities[k, agent] = values[dim:]
    return times, positions, velocities


def load_run(input_dir) -> RunData:
    """Load one run directory; raises ArtifactError on any inconsistency."""
    csv_path = os.path.join(input_dir, TRAJECTORY_CSV)
    metrics_path = os.path.join(input_dir, METRICS_JSON)
    for path in (csv_path, metrics_path):
        if not os.path.exists(path):
            raise ArtifactError(f"missing required artifact: {path}")
    times, positions, velocities = _read_trajectory(csv_path)
    with open(metrics_path) as f:
        metrics = json.load(f)

    scenario = None
    scenario_path = os.path.join(input_dir, SCENARIO_JSON)
    if os.path.exists(scenario_path):
        with open(scenario_path) as f:
            scenario = json.load(f)

    n, dim = positions.shape[1], positions.shape[2]
    for source, key, expected in (
        (metrics, "n", n),
        (metrics, "dim", dim),
        (scenario or {}, "dim", dim),
    ):
        if key in source and source[key] != expected:
            raise ArtifactError(
                f"artifacts disagree on {key}: trajectory has {expected}, "
                f"json says {source[key]}"
            )
    if scenario is not None and len(scenario.get("starts", [])) not in (0, n):
        raise ArtifactError(
            f"artifacts disagree on n: trajectory has {n}, "
            f"scenario has {len(scenario['starts'])} agents"
        )
    return RunData(
        times=times,
        positions=positions,
        velocities=velocities,
        metrics=metrics,
        scenario=scenario,
    )
