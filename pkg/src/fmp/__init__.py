"""Force-based motion planning: deterministic multi-agent simulation."""

from .assignment import Assignment, assignment_cost, hungarian_assign
from .controller import (
    ForceBreakdown,
    SimulationFault,
    cap_velocity,
    comm_radius,
    control_input,
    d_from_dstar,
    navigational_feedback,
    obstacle_force,
    repulsive_force,
    repulsive_phi,
    resolve_params,
)
from .core import (
    AgentState,
    ControlParams,
    Obstacle,
    PerAxisLimit,
    Scenario,
    ScenarioError,
    UniformLimit,
    distance,
    load_scenario,
    save_scenario,
    validate_scenario,
)
from .metrics import RunMetrics, detect_deadlock, lbt_opt, min_separation, summarize
from .simulator import (
    RunResult,
    StepRecord,
    World,
    collective_potential,
    hamiltonian,
    make_world,
    prepare_run,
    run,
    step,
)

__all__ = [
    "AgentState",
    "Assignment",
    "ControlParams",
    "ForceBreakdown",
    "Obstacle",
    "PerAxisLimit",
    "RunMetrics",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "SimulationFault",
    "StepRecord",
    "UniformLimit",
    "World",
    "assignment_cost",
    "cap_velocity",
    "collective_potential",
    "comm_radius",
    "control_input",
    "d_from_dstar",
    "detect_deadlock",
    "distance",
    "hamiltonian",
    "hungarian_assign",
    "lbt_opt",
    "load_scenario",
    "make_world",
    "min_separation",
    "navigational_feedback",
    "obstacle_force",
    "prepare_run",
    "repulsive_force",
    "repulsive_phi",
    "resolve_params",
    "run",
    "save_scenario",
    "step",
    "summarize",
    "validate_scenario",
]
