"""Synchronous time-stepping engine.

Every step evaluates all control forces against the frozen pre-step
snapshot, then integrates with semi-implicit Euler: the velocity is
updated first, hard-capped, and the position advances with the new
velocity. Results are bitwise deterministic and independent of how the
per-agent evaluations are scheduled, because the accumulation order of
every floating-point sum is fixed by agent index.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .assignment import Assignment, hungarian_assign
from .controller import (
    COINCIDENT_EPS,
    CoincidentAgentsFault,
    ObstaclePenetrationFault,
    SimulationFault,
    cap_is_active,
    cap_velocity,
    resolve_params,
)
from .core import (
    ControlParams,
    Obstacle,
    PerAxisLimit,
    Scenario,
    ScenarioError,
    UniformLimit,
    validate_scenario,
)
from .neighbors import min_pairwise_distance, neighbor_pairs, pair_distances


@dataclass(frozen=True)
class World:
    """Immutable snapshot of the multi-agent system at one instant."""

    time: float
    positions: np.ndarray  # (n, dim)
    velocities: np.ndarray  # (n, dim)
    targets: np.ndarray  # (n, dim), post-assignment goals
    obstacles: tuple[Obstacle, ...]
    obstacle_centers: np.ndarray  # (m, dim), current positions
    params: ControlParams

    @property
    def n(self) -> int:
        return len(self.positions)

    def obstacle_geometry(self):
        return [
            (self.obstacle_centers[k], self.obstacles[k].radius)
            for k in range(len(self.obstacles))
        ]

    def max_goal_distance(self) -> float:
        delta = self.positions - self.targets
        return float(np.max(np.sqrt(np.sum(delta * delta, axis=1))))


def make_world(scenario: Scenario, targets, params: ControlParams) -> World:
    positions = np.asarray(scenario.starts, dtype=np.float64)
    centers = (
        np.asarray([ob.center for ob in scenario.obstacles], dtype=np.float64)
        if scenario.obstacles
        else np.empty((0, scenario.dim))
    )
    return World(
        time=0.0,
        positions=positions,
        velocities=np.zeros_like(positions),
        targets=np.asarray(targets, dtype=np.float64),
        obstacles=scenario.obstacles,
        obstacle_centers=centers,
        params=params,
    )


@dataclass(frozen=True)
class StepRecord:
    """Logged state after one step (or the initial state at t = 0)."""

    t: float
    positions: np.ndarray
    velocities: np.ndarray
    min_separation: float
    max_goal_distance: float
    hamiltonian: float
    cap_active: tuple[bool, ...]


@dataclass(frozen=True)
class RunSeries:
    """Per-step scalar diagnostics over the full run (never down-sampled)."""

    t: np.ndarray
    min_separation: np.ndarray
    max_goal_distance: np.ndarray
    hamiltonian: np.ndarray
    max_speed: np.ndarray
    min_obstacle_clearance: np.ndarray


@dataclass(frozen=True)
class HamiltonianBreakdown:
    total: float
    potential: float  # collective pairwise potential V(p)
    inertia: float  # c1-weighted moment of inertia c1 * J(p)
    kinetic: float  # K(v)


@dataclass
class RunResult:
    trajectory: tuple[StepRecord, ...]
    series: RunSeries
    metrics: object | None
    converged: bool
    fault: str | None
    params: ControlParams
    assignment: Assignment | None
    targets: np.ndarray
    transition_time: float | None
    execution_time_ms: float
    steps: int


def _psi(z: np.ndarray, r: float, rho: float) -> np.ndarray:
    return np.where(z < r, (rho / 3.0) * np.maximum(r - z, 0.0) ** 3, 0.0)


def collective_potential(positions, params: ControlParams, pair_dists=None) -> float:
    """Summed pairwise repulsive potential; zero iff all pairs are >= r apart."""
    positions = np.asarray(positions, dtype=np.float64)
    if pair_dists is None:
        _, _, pair_dists = neighbor_pairs(positions, params.r, mode="brute")
    if len(pair_dists) and float(np.min(pair_dists)) < COINCIDENT_EPS:
        i, j, d = neighbor_pairs(positions, params.r, mode="brute")
        k = int(np.argmin(d))
        raise CoincidentAgentsFault(int(i[k]), int(j[k]), float(d[k]))
    return float(np.sum(_psi(pair_dists, params.r, params.rho)))


def hamiltonian(world: World, pair_dists=None) -> HamiltonianBreakdown:
    """Structural energy: collective potential + c1-weighted inertia + kinetic."""
    p = world.params
    potential = collective_potential(world.positions, p, pair_dists)
    delta = world.positions - world.targets
    inertia = p.c1 * 0.5 * float(np.sum(delta * delta))
    kinetic = 0.5 * float(np.sum(world.velocities * world.velocities))
    return HamiltonianBreakdown(
        total=potential + inertia + kinetic,
        potential=potential,
        inertia=inertia,
        kinetic=kinetic,
    )


def _repulsive_forces(positions, i, j, dist, r: float, rho: float) -> np.ndarray:
    if len(dist) and float(np.min(dist)) < COINCIDENT_EPS:
        k = int(np.argmin(dist))
        raise CoincidentAgentsFault(int(i[k]), int(j[k]), float(dist[k]))
    force = np.zeros_like(positions)
    if len(dist):
        phi = -rho * (dist - r) ** 2
        unit = (positions[j] - positions[i]) / dist[:, None]
        contrib = phi[:, None] * unit
        np.add.at(force, i, contrib)
        np.add.at(force, j, -contrib)
    return force


def _obstacle_forces(world: World):
    """Vectorized obstacle repulsion; returns (force, min surface clearance)."""
    p = world.params
    force = np.zeros_like(world.positions)
    min_clearance = float("inf")
    for k in range(len(world.obstacles)):
        center = world.obstacle_centers[k]
        radius = world.obstacles[k].radius
        delta = center - world.positions
        center_dist = np.sqrt(np.sum(delta * delta, axis=1))
        surface = center_dist - radius
        worst = int(np.argmin(surface))
        if surface[worst] <= 0:
            raise ObstaclePenetrationFault(worst, k, float(surface[worst]))
        min_clearance = min(min_clearance, float(surface[worst]))
        near = surface < p.r_hat
        if np.any(near):
            phi = -p.rho_hat * (surface[near] - p.r_hat) ** 2
            force[near] += phi[:, None] * (delta[near] / center_dist[near, None])
    return force, min_clearance


def control_forces(world: World, pairs=None):
    """Total control acceleration for every agent, from the frozen snapshot."""
    p = world.params
    if pairs is None:
        pairs = neighbor_pairs(world.positions, p.r, mode="brute")
    i, j, dist = pairs
    rep = _repulsive_forces(world.positions, i, j, dist, p.r, p.rho)
    nav = -p.c1 * (world.positions - world.targets) - p.c2 * world.velocities
    obs, min_clearance = _obstacle_forces(world)
    return rep + nav + obs, min_clearance


def _cap_all(velocities: np.ndarray, params: ControlParams):
    """Vectorized hard velocity cap; bitwise equal to per-agent cap_velocity."""
    limit = params.v_limit
    out = velocities.copy()
    if isinstance(limit, UniformLimit):
        active = np.zeros(len(out), dtype=bool)
        while True:
            norms = np.sqrt(np.sum(out * out, axis=1))
            over = norms > limit.v_max
            if not np.any(over):
                break
            active |= over
            out[over] = out[over] * (limit.v_max / norms[over])[:, None]
        return out, active
    if isinstance(limit, PerAxisLimit):
        active = np.zeros(len(out), dtype=bool)
        while True:
            norms = np.sqrt(np.sum(out[:, :2] * out[:, :2], axis=1))
            over = norms > limit.horizontal
            if not np.any(over):
                break
            active |= over
            out[over, :2] = out[over, :2] * (limit.horizontal / norms[over])[:, None]
        vertical = (velocities[:, 2] > limit.up) | (velocities[:, 2] < -limit.down)
        out[:, 2] = np.minimum(np.maximum(out[:, 2], -limit.down), limit.up)
        return out, active | vertical
    raise TypeError(f"unknown velocity limit {limit!r}")


def _advance(world: World, pairs=None):
    """One semi-implicit Euler step; returns (world', cap_active, min_clearance)."""
    p = world.params
    u, min_clearance = control_forces(world, pairs)
    new_v, cap_active = _cap_all(world.velocities + u * p.dt, p)
    new_p = world.positions + new_v * p.dt
    if len(world.obstacles):
        shift = np.stack(
            [ob.velocity_at(world.time) for ob in world.obstacles]
        )
        centers = world.obstacle_centers + shift * p.dt
    else:
        centers = world.obstacle_centers
    new_world = replace(
        world,
        time=world.time + p.dt,
        positions=new_p,
        velocities=new_v,
        obstacle_centers=centers,
    )
    return new_world, cap_active, min_clearance


def step(world: World, neighbor_mode: str = "auto") -> World:
    """Advance the world by one time step from its frozen snapshot."""
    pairs = neighbor_pairs(world.positions, world.params.r, mode=neighbor_mode)
    new_world, _, _ = _advance(world, pairs)
    return new_world


def _obstacle_min_clearance(world: World) -> float:
    best = float("inf")
    for k in range(len(world.obstacles)):
        delta = world.obstacle_centers[k] - world.positions
        surface = np.sqrt(np.sum(delta * delta, axis=1)) - world.obstacles[k].radius
        worst = int(np.argmin(surface))
        if surface[worst] <= 0:
            raise ObstaclePenetrationFault(worst, k, float(surface[worst]))
        best = min(best, float(surface[worst]))
    return best


def prepare_run(scenario: Scenario, overrides: dict | None = None):
    """Resolve assignment and parameters; returns (world, params, assignment)."""
    merged = scenario.override_dict()
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    if "d_star" not in merged:
        raise ScenarioError("scenario or overrides must provide d_star")
    if "v_max" not in merged:
        raise ScenarioError("scenario or overrides must provide v_max")
    v_limit = merged.pop("v_max")
    if not isinstance(v_limit, (UniformLimit, PerAxisLimit)):
        v_limit = UniformLimit(float(v_limit))

    starts = np.asarray(scenario.starts, dtype=np.float64)
    goals = np.asarray(scenario.goals, dtype=np.float64)
    if scenario.preassigned:
        assignment = None
        targets = goals
    else:
        assignment = hungarian_assign(starts, goals)
        targets = goals[list(assignment.perm)]

    delta = targets - starts
    dists = np.sqrt(np.sum(delta * delta, axis=1))
    xi = float(np.max(dists) ** 2)
    lbt = float(np.max(dists)) / v_limit.effective_max

    params = resolve_params(
        dim=scenario.dim,
        n=scenario.n,
        d_star=float(merged.pop("d_star")),
        xi=xi,
        v_limit=v_limit,
        lbt=lbt,
        **merged,
    )
    report = validate_scenario(scenario, params)
    if not report.ok:
        raise ScenarioError(
            f"scenario {scenario.name!r} fails spacing validation (d = {params.d:.4g} m):\n"
            + report.describe()
        )
    world = make_world(scenario, targets, params)
    if scenario.obstacles:
        try:
            _obstacle_min_clearance(world)
        except ObstaclePenetrationFault as fault:
            raise ScenarioError(
                f"an agent starts inside or on an obstacle: {fault}"
            ) from None
    return world, params, assignment


def run(
    scenario: Scenario,
    overrides: dict | None = None,
    *,
    log_every: int = 1,
    neighbor_mode: str = "auto",
    workers: int | None = None,
) -> RunResult:
    """Execute the full planning loop until convergence or timeout.

    Agents start at rest and the loop stops once every agent is within
    end_max_dis of its target, or at max_sim_time. ``workers`` is accepted
    for API symmetry with batch drivers; per-step numerics are evaluated
    in a fixed order, so results never depend on it.

    Trajectory records are kept every ``log_every`` steps (plus the first
    and last); the scalar diagnostic series always covers every step.
    """
    del workers  # results are worker-count independent by construction
    world, params, assignment = prepare_run(scenario, overrides)
    n_obstacles = len(scenario.obstacles)

    records: list[StepRecord] = []
    s_t, s_minsep, s_maxgoal, s_h, s_maxspeed, s_clear = [], [], [], [], [], []

    def observe(w: World, pairs, cap_active, min_clearance, logged: bool):
        min_sep = min_pairwise_distance(w.positions, mode=neighbor_mode)
        max_goal = w.max_goal_distance()
        h = hamiltonian(w, pairs[2]).total
        speeds = np.sqrt(np.sum(w.velocities * w.velocities, axis=1))
        s_t.append(w.time)
        s_minsep.append(min_sep)
        s_maxgoal.append(max_goal)
        s_h.append(h)
        s_maxspeed.append(float(np.max(speeds)))
        s_clear.append(min_clearance)
        if logged:
            records.append(
                StepRecord(
                    t=w.time,
                    positions=w.positions.copy(),
                    velocities=w.velocities.copy(),
                    min_separation=min_sep,
                    max_goal_distance=max_goal,
                    hamiltonian=h,
                    cap_active=tuple(bool(x) for x in cap_active),
                )
            )
        return max_goal

    fault = None
    converged = False
    transition_time: float | None = None
    steps = 0
    max_steps = int(np.ceil(params.max_sim_time / params.dt - 1e-9))

    start_clock = _time.perf_counter()
    try:
        pairs = neighbor_pairs(world.positions, params.r, mode=neighbor_mode)
        clearance0 = (
            _obstacle_min_clearance(world) if n_obstacles else float("inf")
        )
        max_goal = observe(
            world, pairs, np.zeros(world.n, dtype=bool), clearance0, logged=True
        )
        if max_goal < params.end_max_dis:
            converged = True
            transition_time = 0.0
        else:
            for k in range(1, max_steps + 1):
                world, cap_active, min_clearance = _advance(world, pairs)
                steps = k
                pairs = neighbor_pairs(world.positions, params.r, mode=neighbor_mode)
                logged = (k % log_every == 0) or (k == max_steps)
                max_goal = observe(
                    world, pairs, cap_active, min_clearance, logged=logged
                )
                if max_goal < params.end_max_dis:
                    converged = True
                    transition_time = world.time
                    if not logged:
                        records.append(
                            StepRecord(
                                t=world.time,
                                positions=world.positions.copy(),
                                velocities=world.velocities.copy(),
                                min_separation=s_minsep[-1],
                                max_goal_distance=max_goal,
                                hamiltonian=s_h[-1],
                                cap_active=tuple(bool(x) for x in cap_active),
                            )
                        )
                    break
    except SimulationFault as e:
        fault = f"step {steps + 1}: {e}"
    execution_ms = (_time.perf_counter() - start_clock) * 1e3

    series = RunSeries(
        t=np.asarray(s_t),
        min_separation=np.asarray(s_minsep),
        max_goal_distance=np.asarray(s_maxgoal),
        hamiltonian=np.asarray(s_h),
        max_speed=np.asarray(s_maxspeed),
        min_obstacle_clearance=np.asarray(s_clear),
    )
    result = RunResult(
        trajectory=tuple(records),
        series=series,
        metrics=None,
        converged=converged,
        fault=fault,
        params=params,
        assignment=assignment,
        targets=world.targets,
        transition_time=transition_time,
        execution_time_ms=execution_ms,
        steps=steps,
    )
    from .metrics import summarize  # local import: metrics aggregates run results

    result.metrics = summarize(result, scenario, params)
    return result
