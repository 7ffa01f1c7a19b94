"""Benchmark scenario generators and the Poisson-disc sampler.

All generators are pure functions of their arguments (and seed), so a
given configuration always produces the identical scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import DEFAULT_RHO, d_from_dstar
from .core import Obstacle, Scenario, ScenarioError, UniformLimit, VelocityLimit


def _overrides(d_star: float, v_max: float | VelocityLimit, extra: dict | None = None):
    out = {"d_star": float(d_star)}
    # Normalized to a limit object so a scenario equals its JSON round-trip.
    out["v_max"] = v_max if isinstance(v_max, VelocityLimit) else UniformLimit(float(v_max))
    if extra:
        out.update(extra)
    return tuple(sorted(out.items(), key=lambda kv: str(kv[0])))


def _cos_sin_turns(turns: float) -> tuple[float, float]:
    """cos/sin of 2*pi*turns, exact at the four cardinal directions.

    math.sin(pi) is ~1.2e-16, which would smear points that land exactly
    on an axis and break the mirror symmetry of antipodal layouts.
    """
    t = turns % 1.0
    exact = {0.0: (1.0, 0.0), 0.25: (0.0, 1.0), 0.5: (-1.0, 0.0), 0.75: (0.0, -1.0)}
    if t in exact:
        return exact[t]
    angle = 2.0 * math.pi * t
    return math.cos(angle), math.sin(angle)


def circle_scenario(
    n: int,
    radius: float,
    dim: int = 2,
    *,
    min_spacing: float | None = None,
    d_star: float = 3.0,
    v_max: float = 15.0,
    extra: dict | None = None,
) -> Scenario:
    """Agents evenly spaced on a circle, each heading to its antipode.

    When ``min_spacing`` is given, the adjacent chord spacing must reach
    it; the error names the smallest admissible radius.
    """
    if n < 2 or radius <= 0:
        raise ScenarioError(f"need n >= 2 and radius > 0, got n={n}, radius={radius}")
    spacing = 2.0 * radius * math.sin(math.pi / n)
    if min_spacing is not None and spacing < min_spacing:
        needed = min_spacing / (2.0 * math.sin(math.pi / n))
        raise ScenarioError(
            f"adjacent spacing {spacing:.4g} m < {min_spacing:.4g} m; "
            f"radius must be at least {needed:.4g} m"
        )
    starts, goals = [], []
    for k in range(n):
        c, s = _cos_sin_turns(k / n)
        p = (radius * c, radius * s)
        if dim == 3:
            p = (*p, 0.0)
        starts.append(p)
        goals.append(tuple(-x for x in p))
    return Scenario(
        dim=dim,
        starts=tuple(starts),
        goals=tuple(goals),
        name=f"circle_n{n}_r{radius:g}",
        preassigned=True,
        overrides=_overrides(d_star, v_max, extra),
    )


def grid_swap_scenario(
    kind: str,
    n: int,
    spacing: float,
    *,
    d_star: float = 5.0,
    v_max: float = 15.0,
    jitter: float = 0.0,
    seed: int = 0,
    extra: dict | None = None,
) -> Scenario:
    """k x k grid whose goals are the mirrored (or transposed) grid cells.

    The exact mirror grid is a degenerate instance: rows are farther apart
    than the communication radius and all within-row forces are collinear,
    so agents are confined to their row's line and can never pass each
    other. A tiny deterministic ``jitter`` (meters, seeded) on the start
    positions breaks that measure-zero symmetry without changing the
    problem in any meaningful way.
    """
    if kind not in ("mirror", "diagonal"):
        raise ScenarioError(f"kind must be mirror or diagonal, got {kind!r}")
    k = math.isqrt(n)
    if k * k != n:
        raise ScenarioError(f"n must be a perfect square, got {n}")
    if spacing <= 0:
        raise ScenarioError(f"spacing must be > 0, got {spacing}")
    rng = np.random.default_rng(seed) if jitter else None
    starts, goals = [], []
    for row in range(k):
        for col in range(k):
            p = (col * spacing, row * spacing)
            if rng is not None:
                p = tuple(x + jitter * float(rng.standard_normal()) for x in p)
            starts.append(p)
            if kind == "mirror":
                goals.append(((k - 1 - col) * spacing, row * spacing))
            else:
                goals.append((row * spacing, col * spacing))
    return Scenario(
        dim=2,
        starts=tuple(starts),
        goals=tuple(goals),
        name=f"swap_{kind}_n{n}_s{spacing:g}",
        preassigned=True,
        overrides=_overrides(d_star, v_max, extra),
    )


# --- Poisson-disc sampling (Bridson) ---------------------------------------

_CANDIDATE_ATTEMPTS = 30
_RESTART_LIMIT = 20


def _packing_capacity(box, min_spacing: float) -> float:
    dim = len(box)
    if dim == 2:
        # Hexagonal packing of discs of radius s/2.
        per_point = math.pi * (min_spacing / 2.0) ** 2 / 0.9069
        volume = box[0] * box[1]
    else:
        per_point = (4.0 / 3.0) * math.pi * (min_spacing / 2.0) ** 3 / 0.7405
        volume = box[0] * box[1] * box[2]
    return volume / per_point


def _bridson(box, min_spacing: float, rng: np.random.Generator):
    dim = len(box)
    cell = min_spacing / math.sqrt(dim)
    grid_shape = tuple(int(math.ceil(b / cell)) for b in box)
    grid = np.full(grid_shape, -1, dtype=np.intp)
    points: list[np.ndarray] = []
    active: list[int] = []

    def cell_of(p):
        return tuple(min(int(p[a] / cell), grid_shape[a] - 1) for a in range(dim))

    def fits(p):
        c = cell_of(p)
        lo = [max(c[a] - 2, 0) for a in range(dim)]
        hi = [min(c[a] + 3, grid_shape[a]) for a in range(dim)]
        ranges = [range(lo[a], hi[a]) for a in range(dim)]
        idx_iter = (
            [(x, y) for x in ranges[0] for y in ranges[1]]
            if dim == 2
            else [(x, y, z) for x in ranges[0] for y in ranges[1] for z in ranges[2]]
        )
        for idx in idx_iter:
            k = grid[idx]
            if k >= 0 and float(np.linalg.norm(points[k] - p)) < min_spacing:
                return False
        return True

    def insert(p):
        grid[cell_of(p)] = len(points)
        points.append(p)
        active.append(len(points) - 1)

    insert(rng.random(dim) * np.asarray(box))
    while active:
        slot = int(rng.integers(len(active)))
        base = points[active[slot]]
        placed = False
        for _ in range(_CANDIDATE_ATTEMPTS):
            direction = rng.normal(size=dim)
            norm = float(np.linalg.norm(direction))
            if norm == 0.0:
                continue
            radius = min_spacing * (1.0 + rng.random())
            cand = base + direction * (radius / norm)
            if np.all(cand >= 0) and np.all(cand < np.asarray(box)) and fits(cand):
                insert(cand)
                placed = True
                break
        if not placed:
            active.pop(slot)
    return points


def poisson_disc(box, min_spacing: float, n: int, seed: int):
    """Exactly n blue-noise points with pairwise spacing >= min_spacing.

    Bridson dart throwing with 30 candidate attempts per active point; if
    a maximal sample falls short of n, the draw restarts with a derived
    seed, up to a bounded retry count.
    """
    box = tuple(float(b) for b in box)
    if len(box) not in (2, 3) or any(b <= 0 for b in box):
        raise ScenarioError(f"box must be 2 or 3 positive extents, got {box}")
    if min_spacing <= 0 or n < 1:
        raise ScenarioError(f"need min_spacing > 0 and n >= 1")
    if n > _packing_capacity(box, min_spacing):
        raise ScenarioError(
            f"{n} points at spacing {min_spacing:.4g} m cannot fit in {box}"
        )
    for attempt in range(_RESTART_LIMIT):
        rng = np.random.default_rng((int(seed) * 1000003 + attempt) & (2**63 - 1))
        points = _bridson(box, min_spacing, rng)
        if len(points) >= n:
            return [p.copy() for p in points[:n]]
    raise ScenarioError(
        f"could not place {n} points at spacing {min_spacing:.4g} m in {box} "
        f"after {_RESTART_LIMIT} attempts"
    )


@dataclass(frozen=True)
class RandomCaseSpec:
    """One random benchmark instance: n agents in an axis-aligned box."""

    n: int
    box: tuple[float, ...]
    seed: int
    min_spacing: float | None = None  # derived from the control params when None


def random_scenario(
    spec: RandomCaseSpec,
    *,
    d_star: float = 5.0,
    v_max: float | VelocityLimit = 3.0,
    rho: float = DEFAULT_RHO,
    extra: dict | None = None,
) -> Scenario:
    """Random starts and goals drawn by Poisson-disc sampling.

    The sampling spacing is the derived bound d evaluated at the worst
    case xi (the squared box diagonal), so the actual draw always also
    satisfies the smaller bound recomputed from its own xi.
    """
    box = tuple(float(b) for b in spec.box)
    dim = len(box)
    v_limit = v_max if isinstance(v_max, VelocityLimit) else UniformLimit(float(v_max))
    spacing = spec.min_spacing
    if spacing is None:
        xi_upper = float(sum(b * b for b in box))
        spacing = d_from_dstar(
            d_star, spec.n, xi_upper, v_limit.effective_max, rho, dim
        )
    starts = poisson_disc(box, spacing, spec.n, spec.seed)
    goals = poisson_disc(box, spacing, spec.n, spec.seed + 0x5DEECE66D)
    over = dict(extra or {})
    if rho != DEFAULT_RHO:
        over["rho"] = rho
    return Scenario(
        dim=dim,
        starts=tuple(tuple(p) for p in starts),
        goals=tuple(tuple(p) for p in goals),
        name=f"random_n{spec.n}_seed{spec.seed}",
        preassigned=False,
        overrides=_overrides(d_star, v_max if isinstance(v_max, VelocityLimit) else float(v_max), over),
    )


# Fixed obstacle-passage geometry: four 5x5 groups on the arena sides,
# goals point-reflected through the origin, four static discs leaving
# axis-aligned corridors of half-width 4 m through the center.
_PASSAGE_GROUP_OFFSET = 40.0
_PASSAGE_GROUP_SPACING = 2.5
_PASSAGE_OBSTACLE_OFFSET = 12.0
_PASSAGE_OBSTACLE_RADIUS = 8.0


def obstacle_passage_scenario() -> Scenario:
    """Four 25-agent groups crossing a narrow passage between four discs."""
    starts = []
    half = 2 * _PASSAGE_GROUP_SPACING  # 5x5 grid centered on the group anchor
    for cx, cy in (
        (-_PASSAGE_GROUP_OFFSET, 0.0),
        (_PASSAGE_GROUP_OFFSET, 0.0),
        (0.0, -_PASSAGE_GROUP_OFFSET),
        (0.0, _PASSAGE_GROUP_OFFSET),
    ):
        for row in range(5):
            for col in range(5):
                starts.append(
                    (
                        cx - half + col * _PASSAGE_GROUP_SPACING,
                        cy - half + row * _PASSAGE_GROUP_SPACING,
                    )
                )
    goals = tuple((-x, -y) for x, y in starts)
    obstacles = tuple(
        Obstacle(center=(sx * _PASSAGE_OBSTACLE_OFFSET, sy * _PASSAGE_OBSTACLE_OFFSET),
                 radius=_PASSAGE_OBSTACLE_RADIUS)
        for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1))
    )
    return Scenario(
        dim=2,
        starts=tuple(starts),
        goals=goals,
        obstacles=obstacles,
        name="obstacle_passage",
        preassigned=True,
        overrides=_overrides(1.0, 5.0, {"d_hat_star": 0.5}),
    )


def formation_scenario(
    n: int = 28,
    spacing: float = 12.0,
    *,
    d_star: float = 0.4,
    v_max: float = 10.0,
    extra: dict | None = None,
) -> Scenario:
    """Single circle of n nodes reforming into two concentric circles.

    ``spacing`` is the distance between adjacent nodes on each circle and
    between the two goal rings.
    """
    if n < 4 or n % 2:
        raise ScenarioError(f"n must be even and >= 4, got {n}")
    if spacing <= 0:
        raise ScenarioError(f"spacing must be > 0, got {spacing}")
    big_r = spacing / (2.0 * math.sin(math.pi / n))
    starts = tuple(
        (big_r * math.cos(2 * math.pi * k / n), big_r * math.sin(2 * math.pi * k / n))
        for k in range(n)
    )
    half = n // 2
    inner_r = spacing / (2.0 * math.sin(math.pi / half))
    outer_r = inner_r + spacing
    goals = []
    for ring_r in (inner_r, outer_r):
        for k in range(half):
            angle = 2 * math.pi * k / half
            goals.append((ring_r * math.cos(angle), ring_r * math.sin(angle)))
    return Scenario(
        dim=2,
        starts=starts,
        goals=tuple(goals),
        name=f"formation_n{n}_s{spacing:g}",
        preassigned=False,
        overrides=_overrides(d_star, v_max, extra),
    )


def min_circle_radius(
    n: int,
    d_star: float,
    v_max: float,
    rho: float = DEFAULT_RHO,
    spacing_factor: float = 1.0,
    safety: float = 1.02,
) -> float:
    """Smallest circle radius whose adjacent chord spacing reaches
    spacing_factor times the derived bound d (which itself grows with the
    radius through xi)."""
    sin_half = math.sin(math.pi / n)
    radius = spacing_factor * d_star / (2.0 * sin_half)
    for _ in range(200):
        xi = (2.0 * radius) ** 2
        d = d_from_dstar(d_star, n, xi, v_max, rho, dim=2)
        needed = spacing_factor * d / (2.0 * sin_half)
        if needed <= radius:
            break
        radius = needed
    return radius * safety
