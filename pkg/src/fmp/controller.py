"""Pure force-law evaluation for a single agent.

Three force terms sum into the control acceleration: pairwise repulsion
from agents inside the communication radius, PD navigational feedback
toward the assigned target, and repulsion from nearby obstacle surfaces.
This module also houses the parameter pipeline that derives the spacing
bound ``d`` and the communication radius ``r`` from the required minimum
separation ``d_star``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ControlParams, PerAxisLimit, UniformLimit, VelocityLimit

# Two agents closer than this are treated as coincident: the force
# direction is undefined and the run is faulted rather than regularized.
COINCIDENT_EPS = 1e-9

DEFAULT_RHO = 7.5e6
DEFAULT_C1 = 10.0
DEFAULT_DT = 0.02
DEFAULT_END_MAX_DIS = 0.05
DEFAULT_D_HAT_STAR = 0.5


class SimulationFault(RuntimeError):
    """A physical invariant was violated mid-simulation."""


class CoincidentAgentsFault(SimulationFault):
    def __init__(self, i: int, j: int, dist: float):
        self.pair = (i, j)
        super().__init__(f"agents {i} and {j} coincident (distance {dist:.3e} m)")


class ObstaclePenetrationFault(SimulationFault):
    def __init__(self, agent: int, obstacle: int, clearance: float):
        self.agent = agent
        self.obstacle = obstacle
        super().__init__(
            f"agent {agent} inside obstacle {obstacle} (surface clearance {clearance:.3e} m)"
        )


@dataclass(frozen=True)
class ForceBreakdown:
    """The three control terms and their sum, as acceleration vectors."""

    repulsive: np.ndarray
    navigational: np.ndarray
    obstacle: np.ndarray
    total: np.ndarray


def repulsive_phi(z: float, r: float, rho: float) -> float:
    """Repulsive magnitude between two agents at distance z.

    Negative (pointing the force away from the neighbor) inside the
    communication radius, zero at and beyond it; continuous at z = r.
    """
    if z <= 0:
        raise ValueError(f"repulsive_phi needs z > 0, got {z}")
    if z >= r:
        return 0.0
    return -rho * (z - r) ** 2


def repulsive_force(i: int, positions, r: float, rho: float) -> np.ndarray:
    """Sum of repulsive contributions on agent i from all agents within r."""
    pts = np.asarray(positions, dtype=np.float64)
    force = np.zeros(pts.shape[1])
    for j in range(len(pts)):
        if j == i:
            continue
        delta = pts[j] - pts[i]
        dist = _norm(delta)
        if dist >= r:
            continue
        if dist < COINCIDENT_EPS:
            raise CoincidentAgentsFault(min(i, j), max(i, j), dist)
        force += repulsive_phi(dist, r, rho) * (delta / dist)
    return force


def navigational_feedback(p, v, target, c1: float, c2: float) -> np.ndarray:
    """PD attraction toward the target: -c1 (p - target) - c2 v."""
    p = np.asarray(p, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    return -c1 * (p - target) - c2 * v


def _obstacle_geometry(obstacle):
    if hasattr(obstacle, "center"):
        return np.asarray(obstacle.center, dtype=np.float64), float(obstacle.radius)
    center, radius = obstacle
    return np.asarray(center, dtype=np.float64), float(radius)


def obstacle_force(p, obstacles, r_hat: float, rho_hat: float) -> np.ndarray:
    """Repulsion from every obstacle whose surface is closer than r_hat.

    ``obstacles`` is a sequence of Obstacle objects or (center, radius)
    pairs. Surface distance is measured to the closest surface point.
    """
    p = np.asarray(p, dtype=np.float64)
    force = np.zeros_like(p)
    for k, ob in enumerate(obstacles):
        center, radius = _obstacle_geometry(ob)
        center_dist = float(np.linalg.norm(center - p))
        surface = center_dist - radius
        if surface <= 0:
            raise ObstaclePenetrationFault(-1, k, surface)
        if surface >= r_hat:
            continue
        phi = -rho_hat * (surface - r_hat) ** 2
        force += phi * ((center - p) / center_dist)
    return force


def comm_radius(v_max_eff: float, rho: float, d: float) -> float:
    """Communication radius sized so repulsion cannot exceed the speed cap."""
    if not (v_max_eff > 0 and rho > 0 and d > 0):
        raise ValueError("comm_radius needs positive inputs")
    return d + (3.0 * v_max_eff**2 / (2.0 * rho)) ** (1.0 / 3.0)


def d_from_dstar(
    d_star: float, n: int, xi: float, v_max_eff: float, rho: float, dim: int
) -> float:
    """Initial-spacing bound that makes d_star a guaranteed separation.

    Accounts for the worst-case neighbor count (6 in 2D, 12 in 3D) and the
    maximum squared start-to-goal distance xi.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if not (d_star > 0 and n >= 1 and xi >= 0 and v_max_eff > 0 and rho > 0):
        raise ValueError("d_from_dstar needs positive inputs")
    factor = 9 * n - 3 if dim == 2 else 18 * n - 3
    return d_star + ((factor * v_max_eff**2 + 3 * n * xi) / (2.0 * rho)) ** (1.0 / 3.0)


def _norm(v: np.ndarray) -> float:
    # sqrt-of-sum spelled out so scalar and vectorized call sites produce
    # bitwise identical results (np.linalg.norm routes through BLAS).
    return float(np.sqrt(np.sum(v * v)))


def _norm_clamp(v: np.ndarray, bound: float) -> np.ndarray:
    # Loop guards against the rescaled norm landing one ulp above the
    # bound, which would break exact idempotence.
    out = v
    norm = _norm(out)
    while norm > bound:
        out = out * (bound / norm)
        norm = _norm(out)
    return out


def cap_velocity(v, limit: VelocityLimit) -> np.ndarray:
    """Hard projection of a velocity onto the admissible set.

    Uniform limits rescale the whole vector; per-axis limits clamp the
    horizontal-plane norm and the vertical component independently.
    Idempotent: capping a capped velocity returns it unchanged.
    """
    v = np.asarray(v, dtype=np.float64)
    if isinstance(limit, UniformLimit):
        return _norm_clamp(v, limit.v_max)
    if isinstance(limit, PerAxisLimit):
        if v.shape[0] != 3:
            raise ValueError("per-axis limits require 3D velocities")
        out = v.copy()
        out[:2] = _norm_clamp(v[:2], limit.horizontal)
        out[2] = min(max(v[2], -limit.down), limit.up)
        return out
    raise TypeError(f"unknown velocity limit {limit!r}")


def cap_is_active(v, limit: VelocityLimit) -> bool:
    """Whether cap_velocity would modify v (the discrete zero-branch indicator)."""
    v = np.asarray(v, dtype=np.float64)
    if isinstance(limit, UniformLimit):
        return _norm(v) > limit.v_max
    return (
        _norm(v[:2]) > limit.horizontal
        or v[2] > limit.up
        or v[2] < -limit.down
    )


def control_input(i: int, world, params: ControlParams | None = None) -> ForceBreakdown:
    """Evaluate the full control force on agent i from a frozen snapshot.

    ``world`` provides positions, velocities, targets and obstacle
    geometry (see simulator.World); nothing is mutated.
    """
    p = params if params is not None else world.params
    try:
        rep = repulsive_force(i, world.positions, p.r, p.rho)
    except CoincidentAgentsFault:
        raise
    nav = navigational_feedback(
        world.positions[i], world.velocities[i], world.targets[i], p.c1, p.c2
    )
    try:
        obs = obstacle_force(
            world.positions[i], world.obstacle_geometry(), p.r_hat, p.rho_hat
        )
    except ObstaclePenetrationFault as fault:
        raise ObstaclePenetrationFault(i, fault.obstacle, float("nan")) from None
    return ForceBreakdown(
        repulsive=rep, navigational=nav, obstacle=obs, total=rep + nav + obs
    )


def default_r_hat(d_hat_star: float, v_max_eff: float, rho_hat: float) -> float:
    """Obstacle interaction range: required clearance plus the braking margin."""
    return d_hat_star + (3.0 * v_max_eff**2 / (2.0 * rho_hat)) ** (1.0 / 3.0)


def resolve_params(
    *,
    dim: int,
    n: int,
    d_star: float,
    xi: float,
    v_limit: VelocityLimit,
    rho: float = DEFAULT_RHO,
    c1: float = DEFAULT_C1,
    c2: float | None = None,
    dt: float = DEFAULT_DT,
    end_max_dis: float = DEFAULT_END_MAX_DIS,
    max_sim_time: float | None = None,
    rho_hat: float | None = None,
    r_hat: float | None = None,
    d_hat_star: float = DEFAULT_D_HAT_STAR,
    lbt: float = 0.0,
) -> ControlParams:
    """Run the d* -> d -> r pipeline and fill every default.

    ``c2`` defaults to critical damping of the PD feedback (2 sqrt(c1));
    ``max_sim_time`` to max(60 s, 10x the straight-line lower bound).
    """
    if c2 is None:
        c2 = 2.0 * math.sqrt(c1)
    if rho_hat is None:
        rho_hat = rho
    v_eff = v_limit.effective_max
    if r_hat is None:
        r_hat = default_r_hat(d_hat_star, v_eff, rho_hat)
    if max_sim_time is None:
        max_sim_time = max(60.0, 10.0 * lbt)
    d = d_from_dstar(d_star, n, xi, v_eff, rho, dim)
    r = comm_radius(v_eff, rho, d)
    return ControlParams(
        dim=dim,
        d_star=d_star,
        d=d,
        r=r,
        rho=rho,
        c1=c1,
        c2=c2,
        v_limit=v_limit,
        dt=dt,
        end_max_dis=end_max_dis,
        max_sim_time=max_sim_time,
        xi=xi,
        rho_hat=rho_hat,
        r_hat=r_hat,
        d_hat_star=d_hat_star,
    )
