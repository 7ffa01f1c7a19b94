"""Geometry primitives and the shared domain model.

Positions, velocities and accelerations are plain numpy float64 arrays of
length ``dim`` (2 or 3). All quantities are SI (meters, seconds). Domain
types are frozen dataclasses storing tuples, so they are safe to share
between threads; the simulation engine converts to numpy arrays internally.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np


class DimensionError(ValueError):
    """Mixing 2D and 3D values, or a dim outside {2, 3}."""


class ScenarioError(ValueError):
    """Malformed or infeasible scenario configuration."""


def vec(components, dim: int | None = None) -> np.ndarray:
    """Build a finite float64 vector of length 2 or 3."""
    a = np.asarray(components, dtype=np.float64)
    if a.ndim != 1 or a.shape[0] not in (2, 3):
        raise DimensionError(f"expected a 2D or 3D vector, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected dim {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite component in {components!r}")
    return a


def distance(a, b) -> float:
    """Euclidean distance between two points of the same dimension."""
    av, bv = vec(a), vec(b)
    if av.shape != bv.shape:
        raise DimensionError(f"dimension mismatch: {av.shape[0]} vs {bv.shape[0]}")
    return float(np.linalg.norm(av - bv))


@dataclass(frozen=True)
class UniformLimit:
    """Isotropic speed cap: ||v|| <= v_max."""

    v_max: float

    def __post_init__(self):
        if not (self.v_max > 0):
            raise ValueError(f"v_max must be > 0, got {self.v_max}")

    @property
    def effective_max(self) -> float:
        return self.v_max


@dataclass(frozen=True)
class PerAxisLimit:
    """3D cap with separate horizontal-plane, climb and descent bounds.

    ``down`` is a positive magnitude: vz is clamped to [-down, +up].
    """

    horizontal: float
    up: float
    down: float

    def __post_init__(self):
        for name in ("horizontal", "up", "down"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def effective_max(self) -> float:
        # Conservative single number for margin formulas: widest of the bounds.
        return max(self.horizontal, self.up, self.down)


VelocityLimit = UniformLimit | PerAxisLimit


@dataclass(frozen=True)
class AgentState:
    """Position and velocity of one double-integrator agent."""

    position: tuple[float, ...]
    velocity: tuple[float, ...]

    def __post_init__(self):
        p, v = vec(self.position), vec(self.velocity)
        if p.shape != v.shape:
            raise DimensionError("position/velocity dimension mismatch")


@dataclass(frozen=True)
class Obstacle:
    """Spherical (disc in 2D) obstacle, optionally moving.

    ``schedule`` is a piecewise-constant velocity plan: a sorted tuple of
    (start_time, velocity) segments. When present it overrides ``velocity``
    from each segment's start time onward; before the first segment the
    plain ``velocity`` applies.
    """

    center: tuple[float, ...]
    radius: float
    velocity: tuple[float, ...] = ()
    schedule: tuple[tuple[float, tuple[float, ...]], ...] = ()

    def __post_init__(self):
        c = vec(self.center)
        if not (self.radius > 0):
            raise ValueError(f"obstacle radius must be > 0, got {self.radius}")
        if not self.velocity:
            object.__setattr__(self, "velocity", (0.0,) * c.shape[0])
        vec(self.velocity, dim=c.shape[0])
        times = [t for t, _ in self.schedule]
        if times != sorted(times):
            raise ValueError("obstacle schedule must be sorted by time")

    def velocity_at(self, t: float) -> np.ndarray:
        v = self.velocity
        for start, seg_v in self.schedule:
            if t >= start:
                v = seg_v
            else:
                break
        return vec(v, dim=len(self.center))


@dataclass(frozen=True)
class ControlParams:
    """All tunables of one run, including the derived spacing pipeline.

    ``d_star`` is the guaranteed minimum separation, ``d`` the derived
    minimum initial/goal spacing and ``r`` the communication radius built
    on top of it; ``0 < d_star <= d < r`` always holds. ``xi`` is the
    maximum squared start-to-assigned-goal distance of the scenario.
    """

    dim: int
    d_star: float
    d: float
    r: float
    rho: float
    c1: float
    c2: float
    v_limit: VelocityLimit
    dt: float
    end_max_dis: float
    max_sim_time: float
    xi: float
    rho_hat: float
    r_hat: float
    d_hat_star: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionError(f"dim must be 2 or 3, got {self.dim}")
        if not (0 < self.d_star <= self.d < self.r):
            raise ValueError(
                f"need 0 < d_star <= d < r, got d_star={self.d_star}, d={self.d}, r={self.r}"
            )
        for name in ("rho", "c1", "c2", "dt", "end_max_dis", "rho_hat", "r_hat"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def v_max_eff(self) -> float:
        return self.v_limit.effective_max


@dataclass(frozen=True)
class Scenario:
    """Starts, goals and obstacles of one motion-planning instance."""

    dim: int
    starts: tuple[tuple[float, ...], ...]
    goals: tuple[tuple[float, ...], ...]
    obstacles: tuple[Obstacle, ...] = ()
    name: str = "scenario"
    preassigned: bool = False
    # Tunable overrides carried by the scenario file (d_star, v_max, ...).
    overrides: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionError(f"dim must be 2 or 3, got {self.dim}")
        if len(self.starts) != len(self.goals) or len(self.starts) < 1:
            raise ScenarioError(
                f"need |starts| = |goals| >= 1, got {len(self.starts)}/{len(self.goals)}"
            )
        for p in (*self.starts, *self.goals):
            vec(p, dim=self.dim)
        for ob in self.obstacles:
            vec(ob.center, dim=self.dim)

    @property
    def n(self) -> int:
        return len(self.starts)

    def override_dict(self) -> dict:
        return dict(self.overrides)


@dataclass(frozen=True)
class SpacingViolation:
    where: str  # "starts" or "goals"
    i: int
    j: int
    dist: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[SpacingViolation, ...] = ()

    def describe(self) -> str:
        if self.ok:
            return "ok"
        lines = [
            f"{v.where}: pair ({v.i}, {v.j}) at {v.dist:.4g} m" for v in self.violations
        ]
        return "spacing violations:\n" + "\n".join(lines)


def _pairwise_violations(points, d: float, where: str):
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    out = []
    # Row-blocked pairwise scan: O(n^2) work without O(n^2) Python calls.
    for i in range(n - 1):
        delta = pts[i + 1 :] - pts[i]
        dist = np.sqrt(np.sum(delta * delta, axis=1))
        for off in np.flatnonzero(dist < d):
            out.append(SpacingViolation(where, i, i + 1 + int(off), float(dist[off])))
    return out


def validate_scenario(s: Scenario, p: ControlParams) -> ValidationReport:
    """Check start/goal spacing against the derived bound ``p.d``.

    Every violating pair is reported with its distance; an empty report
    means the scenario is safe to run under ``p``.
    """
    violations = _pairwise_violations(s.starts, p.d, "starts")
    violations += _pairwise_violations(s.goals, p.d, "goals")
    return ValidationReport(ok=not violations, violations=tuple(violations))


# --- scenario JSON ---------------------------------------------------------

_PARAM_KEYS = (
    "d_star", "v_max", "c1", "c2", "rho", "dt", "end_max_dis", "max_sim_time",
    "rho_hat", "r_hat", "d_hat_star",
)


def _obstacle_from_json(entry: dict, dim: int) -> Obstacle:
    velocity = entry.get("velocity", [0.0] * dim)
    schedule = ()
    if velocity and isinstance(velocity[0], dict):
        schedule = tuple(
            (float(seg["t"]), tuple(float(x) for x in seg["velocity"]))
            for seg in velocity
        )
        velocity = [0.0] * dim
    return Obstacle(
        center=tuple(float(x) for x in entry["center"]),
        radius=float(entry["radius"]),
        velocity=tuple(float(x) for x in velocity),
        schedule=schedule,
    )


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    try:
        dim = int(data["dim"])
        starts = tuple(tuple(float(x) for x in p) for p in data["starts"])
        goals = tuple(tuple(float(x) for x in p) for p in data["goals"])
    except KeyError as e:
        raise ScenarioError(f"missing required field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"malformed scenario field: {e}") from None
    obstacles = tuple(
        _obstacle_from_json(entry, dim) for entry in data.get("obstacles", [])
    )
    overrides = {}
    for key in _PARAM_KEYS:
        if key in data:
            value = data[key]
            if key == "v_max" and isinstance(value, dict):
                value = PerAxisLimit(
                    horizontal=float(value["horizontal"]),
                    up=float(value["up"]),
                    down=abs(float(value["down"])),
                )
            elif key == "v_max":
                value = UniformLimit(float(value))
            else:
                value = float(value)
            overrides[key] = value
    return Scenario(
        dim=dim,
        starts=starts,
        goals=goals,
        obstacles=obstacles,
        name=str(data.get("name", name)),
        preassigned=bool(data.get("preassigned", False)),
        overrides=tuple(sorted(overrides.items(), key=lambda kv: kv[0])),
    )


def scenario_to_dict(s: Scenario) -> dict:
    data: dict = {
        "name": s.name,
        "dim": s.dim,
        "starts": [list(p) for p in s.starts],
        "goals": [list(p) for p in s.goals],
        "preassigned": s.preassigned,
    }
    if s.obstacles:
        obs = []
        for ob in s.obstacles:
            entry: dict = {"center": list(ob.center), "radius": ob.radius}
            if ob.schedule:
                entry["velocity"] = [
                    {"t": t, "velocity": list(v)} for t, v in ob.schedule
                ]
            elif any(ob.velocity):
                entry["velocity"] = list(ob.velocity)
            obs.append(entry)
        data["obstacles"] = obs
    for key, value in s.overrides:
        if isinstance(value, PerAxisLimit):
            value = {"horizontal": value.horizontal, "up": value.up, "down": value.down}
        elif isinstance(value, UniformLimit):
            value = value.v_max
        data[key] = value
    return data


def load_scenario(path) -> Scenario:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None
    return scenario_from_dict(data, name=str(path))


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w") as f:
        json.dump(scenario_to_dict(s), f, indent=2)
        f.write("\n")
