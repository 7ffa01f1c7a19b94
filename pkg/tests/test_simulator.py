"""Engine: integration step, energy accounting, full runs, determinism."""

import numpy as np
import pytest

from fmp.artifacts import record_to_json_line
from fmp.controller import control_input
from fmp.core import Obstacle, Scenario, ScenarioError, UniformLimit
from fmp.simulator import (
    HamiltonianBreakdown,
    World,
    _cap_all,
    collective_potential,
    control_forces,
    hamiltonian,
    make_world,
    prepare_run,
    run,
    step,
)
from tests.conftest import make_params


def trajectory_bytes(result) -> str:
    return "".join(record_to_json_line(rec) + "\n" for rec in result.trajectory)


class TestStep:
    def test_hand_euler_step(self, simple_world):
        # Lone agent at rest 1 m short of its target, c1 = 10, dt = 0.02:
        # u = (10, 0); v' = u dt = (0.2, 0); p' = p + v' dt = (0.004, 0).
        after = step(simple_world)
        assert tuple(after.velocities[0]) == (0.2, 0.0)
        assert tuple(after.positions[0]) == (0.004, 0.0)
        assert after.time == simple_world.params.dt

    def test_symmetric_head_on_stays_mirrored(self):
        # Mirrored pair approaching head-on: the update is deterministic and
        # symmetric, so the post-step states remain exact mirror images.
        scenario = Scenario(
            dim=2,
            starts=((-1.0, 0.0), (1.0, 0.0)),
            goals=((1.0, 0.0), (-1.0, 0.0)),
            preassigned=True,
        )
        params = make_params(n=2, d_star=0.5, xi=4.0, v_max=5.0)
        world = make_world(scenario, np.asarray(scenario.goals), params)
        world = World(
            time=0.0,
            positions=world.positions,
            velocities=np.asarray([[2.0, 0.0], [-2.0, 0.0]]),
            targets=world.targets,
            obstacles=(),
            obstacle_centers=world.obstacle_centers,
            params=params,
        )
        for _ in range(50):
            world = step(world)
            assert world.positions[0][0] == -world.positions[1][0]
            assert world.velocities[0][0] == -world.velocities[1][0]
            assert world.positions[0][1] == 0.0 == world.positions[1][1]

    def test_velocity_capped_during_step(self, simple_world):
        # Crank the gain so one step would exceed the speed limit.
        params = make_params(n=1, d_star=0.1, xi=1.0, v_max=5.0, c1=100000.0)
        world = World(
            time=0.0,
            positions=simple_world.positions,
            velocities=simple_world.velocities,
            targets=simple_world.targets,
            obstacles=(),
            obstacle_centers=simple_world.obstacle_centers,
            params=params,
        )
        after = step(world)
        assert float(np.linalg.norm(after.velocities[0])) <= 5.0

    def test_moving_obstacle_center_advances(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0),),
            goals=((1.0, 0.0),),
            preassigned=True,
            obstacles=(Obstacle(center=(50.0, 0.0), radius=1.0, velocity=(2.0, 0.0)),),
        )
        params = make_params(n=1, d_star=0.1, xi=1.0)
        world = make_world(scenario, np.asarray(scenario.goals), params)
        after = step(world)
        assert after.obstacle_centers[0][0] == pytest.approx(50.0 + 2.0 * params.dt)


class TestCapAll:
    def test_matches_per_agent_cap_bitwise(self):
        from fmp.controller import cap_velocity

        rng = np.random.default_rng(11)
        params = make_params(n=4, v_max=5.0)
        velocities = rng.uniform(-20, 20, size=(100, 2))
        capped, active = _cap_all(velocities, params)
        for k in range(len(velocities)):
            assert np.array_equal(capped[k], cap_velocity(velocities[k], params.v_limit))
        norms = np.sqrt(np.sum(velocities * velocities, axis=1))
        assert np.array_equal(active, norms > 5.0)


class TestControlForces:
    def test_matches_per_agent_controller_bitwise(self):
        rng = np.random.default_rng(5)
        n = 30
        starts = rng.uniform(0, 30, size=(n, 2))
        goals = rng.uniform(0, 30, size=(n, 2))
        params = make_params(n=n, d_star=0.5, xi=3000.0, v_max=5.0)
        scenario = Scenario(
            dim=2,
            starts=tuple(map(tuple, starts)),
            goals=tuple(map(tuple, goals)),
            preassigned=True,
            obstacles=(Obstacle(center=(60.0, 15.0), radius=2.0),),
        )
        world = make_world(scenario, goals, params)
        world = World(
            time=0.0,
            positions=world.positions,
            velocities=rng.uniform(-3, 3, size=(n, 2)),
            targets=world.targets,
            obstacles=world.obstacles,
            obstacle_centers=world.obstacle_centers,
            params=params,
        )
        total, _ = control_forces(world)
        for i in range(n):
            assert np.array_equal(total[i], control_input(i, world).total), i


class TestHamiltonian:
    def test_hand_value(self):
        # Lone agent at rest 2 m from its target with c1 = 10:
        # H = c1 * (1/2) * 2^2 = 20.
        scenario = Scenario(
            dim=2, starts=((2.0, 0.0),), goals=((0.0, 0.0),), preassigned=True
        )
        params = make_params(n=1, d_star=0.1, xi=4.0)
        world = make_world(scenario, np.asarray(scenario.goals), params)
        h = hamiltonian(world)
        assert isinstance(h, HamiltonianBreakdown)
        assert h.total == 20.0
        assert h.potential == 0.0
        assert h.inertia == 20.0
        assert h.kinetic == 0.0

    def test_kinetic_term(self):
        scenario = Scenario(
            dim=2, starts=((0.0, 0.0),), goals=((0.0, 0.0),), preassigned=True
        )
        params = make_params(n=1, d_star=0.1, xi=0.0)
        world = make_world(scenario, np.asarray(scenario.goals), params)
        world = World(
            time=0.0,
            positions=world.positions,
            velocities=np.asarray([[3.0, 4.0]]),
            targets=world.targets,
            obstacles=(),
            obstacle_centers=world.obstacle_centers,
            params=params,
        )
        assert hamiltonian(world).kinetic == 12.5

    def test_collective_potential_zero_when_separated(self):
        params = make_params(n=2, d_star=1.0, xi=400.0, v_max=5.0)
        assert collective_potential([(0.0, 0.0), (50.0, 0.0)], params) == 0.0

    def test_collective_potential_pair_value(self):
        params = make_params(n=2, d_star=1.0, xi=400.0, v_max=5.0)
        z = params.r - 0.05
        expected = (params.rho / 3.0) * (params.r - z) ** 3
        got = collective_potential([(0.0, 0.0), (z, 0.0)], params)
        assert got == pytest.approx(expected, rel=1e-12)


class TestPrepareRun:
    def test_requires_d_star_and_v_max(self):
        scenario = Scenario(dim=2, starts=((0.0, 0.0),), goals=((1.0, 0.0),))
        with pytest.raises(ScenarioError, match="d_star"):
            prepare_run(scenario, {"v_max": 5.0})
        with pytest.raises(ScenarioError, match="v_max"):
            prepare_run(scenario, {"d_star": 1.0})

    def test_rejects_underspaced_starts(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0), (0.5, 0.0)),
            goals=((10.0, 0.0), (20.0, 0.0)),
            preassigned=True,
        )
        with pytest.raises(ScenarioError, match="spacing validation"):
            prepare_run(scenario, {"d_star": 1.0, "v_max": 5.0})

    def test_rejects_start_inside_obstacle(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0),),
            goals=((10.0, 0.0),),
            preassigned=True,
            obstacles=(Obstacle(center=(0.0, 0.0), radius=1.0),),
        )
        with pytest.raises(ScenarioError):
            prepare_run(scenario, {"d_star": 0.1, "v_max": 5.0})

    def test_hungarian_applied_when_not_preassigned(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0), (30.0, 0.0)),
            goals=((29.0, 0.0), (1.0, 0.0)),
        )
        _, _, assignment = prepare_run(scenario, {"d_star": 1.0, "v_max": 5.0})
        assert assignment is not None
        assert assignment.perm == (1, 0)  # nearest goals, total cost 2

    def test_explicit_overrides_beat_scenario_overrides(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0),),
            goals=((1.0, 0.0),),
            preassigned=True,
            overrides=(("d_star", 0.1), ("v_max", 5.0), ("c1", 3.0)),
        )
        _, params, _ = prepare_run(scenario, {"c1": 7.0})
        assert params.c1 == 7.0


@pytest.fixture
def offset_swap_scenario():
    """Two agents swapping across ~20 m with a lateral offset."""
    return Scenario(
        dim=2,
        starts=((0.0, 0.0), (20.0, 2.0)),
        goals=((20.0, 2.0), (0.0, 0.0)),
        name="offset_swap",
        preassigned=True,
        overrides=(("d_star", 1.0), ("v_max", 5.0)),
    )


class TestRun:
    def test_two_agent_swap_converges(self, offset_swap_scenario):
        result = run(offset_swap_scenario)
        m = result.metrics
        assert result.converged
        assert result.fault is None
        assert m.transition_time == pytest.approx(result.steps * result.params.dt)
        assert m.transition_time >= m.lbt_opt >= 4.0
        # Discrete head-on passes overshoot into the repulsion shell by up
        # to two steps of closing speed before the force reverses them.
        v = result.params.v_max_eff
        floor = result.params.r - 4.0 * v * result.params.dt
        assert m.min_separation >= floor > 0.0

    def test_converged_at_t0(self):
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0),),
            goals=((0.0, 0.001),),
            preassigned=True,
            overrides=(("d_star", 0.1), ("v_max", 5.0)),
        )
        result = run(scenario)
        assert result.converged
        assert result.transition_time == 0.0
        assert result.steps == 0

    def test_timeout_reported_not_converged(self):
        # The exactly-collinear swap is confined to one dimension and can
        # never pass; the run must time out cleanly.
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0), (20.0, 0.0)),
            goals=((20.0, 0.0), (0.0, 0.0)),
            preassigned=True,
            overrides=(("d_star", 1.0), ("v_max", 5.0), ("max_sim_time", 20.0)),
        )
        result = run(scenario)
        assert not result.converged
        assert result.transition_time is None
        assert result.fault is None
        assert result.series.t[-1] == pytest.approx(20.0)

    def test_log_every_downsamples_trajectory_not_series(self, offset_swap_scenario):
        full = run(offset_swap_scenario, log_every=1)
        sparse = run(offset_swap_scenario, log_every=25)
        assert len(sparse.trajectory) < len(full.trajectory)
        assert len(sparse.series.t) == len(full.series.t)
        # First and last records always present.
        assert sparse.trajectory[0].t == 0.0
        assert sparse.trajectory[-1].t == full.trajectory[-1].t

    def test_deterministic_across_reruns_and_workers(self, offset_swap_scenario):
        a = run(offset_swap_scenario, workers=1)
        b = run(offset_swap_scenario, workers=2)
        c = run(offset_swap_scenario, workers=8)
        assert trajectory_bytes(a) == trajectory_bytes(b) == trajectory_bytes(c)

    def test_neighbor_backends_agree_bitwise(self, offset_swap_scenario):
        brute = run(offset_swap_scenario, neighbor_mode="brute")
        tree = run(offset_swap_scenario, neighbor_mode="tree")
        assert trajectory_bytes(brute) == trajectory_bytes(tree)

    def test_min_separation_series_matches_brute_recomputation(
        self, offset_swap_scenario
    ):
        result = run(offset_swap_scenario)
        for rec in result.trajectory:
            pts = np.asarray(rec.positions)
            delta = pts[0] - pts[1]
            assert rec.min_separation == float(np.sqrt(np.sum(delta * delta)))

    def test_coincident_agents_fault_in_step(self):
        from fmp.controller import CoincidentAgentsFault

        params = make_params(n=2, d_star=0.5, xi=0.0, v_max=5.0)
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0), (1e-12, 0.0)),
            goals=((10.0, 0.0), (11.0, 0.0)),
            preassigned=True,
        )
        world = make_world(scenario, np.asarray(scenario.goals), params)
        with pytest.raises(CoincidentAgentsFault):
            step(world)

    def test_obstacle_penetration_fault(self):
        # An agent driven straight at a small obstacle with repulsion too
        # weak to deflect it in time faults rather than tunneling silently.
        scenario = Scenario(
            dim=2,
            starts=((0.0, 0.0),),
            goals=((20.0, 0.0),),
            preassigned=True,
            obstacles=(Obstacle(center=(10.0, 0.0), radius=1.0),),
            overrides=(
                ("d_star", 0.1),
                ("v_max", 10.0),
                ("rho_hat", 1e-6),
                ("r_hat", 0.2),
            ),
        )
        result = run(scenario)
        assert result.fault is not None
        assert "obstacle" in result.fault
        assert "step" in result.fault
