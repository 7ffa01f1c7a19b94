"""Run artifact serialization: trajectory logs, metrics, replay configs.

Floats in the JSON-lines trajectory are written with 17 significant
digits so a re-run can be compared byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os

from .core import ControlParams, PerAxisLimit, Scenario, UniformLimit, save_scenario
from .metrics import metrics_to_dict

TRAJECTORY_JSONL = "trajectory.jsonl"
TRAJECTORY_CSV = "trajectory.csv"
METRICS_JSON = "metrics.json"
SCENARIO_JSON = "scenario.json"
RUN_CONFIG_JSON = "run_config.json"


def fmt_float(x: float) -> str:
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _fmt_vec(v) -> str:
    return "[" + ",".join(fmt_float(x) for x in v) + "]"


def record_to_json_line(rec) -> str:
    fields = [
        f'"t":{fmt_float(rec.t)}',
        '"positions":[' + ",".join(_fmt_vec(p) for p in rec.positions) + "]",
        '"velocities":[' + ",".join(_fmt_vec(v) for v in rec.velocities) + "]",
        f'"min_separation":{fmt_float(rec.min_separation)}',
        f'"max_goal_distance":{fmt_float(rec.max_goal_distance)}',
        f'"hamiltonian":{fmt_float(rec.hamiltonian)}',
        '"cap_active":[' + ",".join("true" if c else "false" for c in rec.cap_active) + "]",
    ]
    return "{" + ",".join(fields) + "}"


def write_trajectory_jsonl(trajectory, path) -> None:
    with open(path, "w") as f:
        for rec in trajectory:
            f.write(record_to_json_line(rec))
            f.write("\n")


def write_trajectory_csv(trajectory, path, dim: int) -> None:
    axes = "xyz"[:dim]
    header = ["t", "id"] + [f"p{a}" for a in axes] + [f"v{a}" for a in axes]
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for rec in trajectory:
            for i in range(len(rec.positions)):
                row = [fmt_float(rec.t), str(i)]
                row += [fmt_float(x) for x in rec.positions[i]]
                row += [fmt_float(x) for x in rec.velocities[i]]
                f.write(",".join(row) + "\n")


def params_to_dict(params: ControlParams) -> dict:
    data = dataclasses.asdict(params)
    limit = params.v_limit
    if isinstance(limit, UniformLimit):
        data["v_limit"] = {"type": "uniform", "v_max": limit.v_max}
    elif isinstance(limit, PerAxisLimit):
        data["v_limit"] = {
            "type": "per_axis",
            "horizontal": limit.horizontal,
            "up": limit.up,
            "down": limit.down,
        }
    return data


def write_metrics_json(run, scenario: Scenario, path, seed=None) -> None:
    payload = {
        "scenario": scenario.name,
        "n": scenario.n,
        "dim": scenario.dim,
        "seed": seed,
        "converged": run.converged,
        "fault": run.fault,
        "metrics": metrics_to_dict(run.metrics),
        "params": params_to_dict(run.params),
    }
    if run.assignment is not None:
        payload["assignment"] = list(run.assignment.perm)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def write_run_artifacts(
    run,
    scenario: Scenario,
    outdir,
    *,
    seed=None,
    run_config: dict | None = None,
) -> None:
    """Write trajectory.jsonl/csv, metrics.json and replay inputs to outdir."""
    os.makedirs(outdir, exist_ok=True)
    write_trajectory_jsonl(run.trajectory, os.path.join(outdir, TRAJECTORY_JSONL))
    write_trajectory_csv(
        run.trajectory, os.path.join(outdir, TRAJECTORY_CSV), scenario.dim
    )
    write_metrics_json(run, scenario, os.path.join(outdir, METRICS_JSON), seed=seed)
    save_scenario(scenario, os.path.join(outdir, SCENARIO_JSON))
    if run_config is not None:
        with open(os.path.join(outdir, RUN_CONFIG_JSON), "w") as f:
            json.dump(run_config, f, indent=2)
            f.write("\n")
