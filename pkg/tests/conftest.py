"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from fmp.core import Scenario, UniformLimit
from fmp.controller import resolve_params
from fmp.simulator import make_world


@pytest.fixture
def two_agent_line_scenario():
    """Two agents 20 m apart on the x-axis swapping positions."""
    return Scenario(
        dim=2,
        starts=((0.0, 0.0), (20.0, 0.0)),
        goals=((20.0, 0.0), (0.0, 0.0)),
        name="line_swap",
        preassigned=True,
        overrides=(("d_star", 1.0), ("v_max", 5.0)),
    )


def make_params(
    *,
    dim=2,
    n=2,
    d_star=1.0,
    xi=400.0,
    v_max=5.0,
    **kw,
):
    return resolve_params(
        dim=dim, n=n, d_star=d_star, xi=xi, v_limit=UniformLimit(v_max), **kw
    )


@pytest.fixture
def simple_world():
    """One agent at rest, 1 m from its target (no neighbors in range)."""
    scenario = Scenario(
        dim=2,
        starts=((0.0, 0.0),),
        goals=((1.0, 0.0),),
        preassigned=True,
        overrides=(("d_star", 0.1), ("v_max", 5.0)),
    )
    params = make_params(n=1, d_star=0.1, xi=1.0)
    return make_world(scenario, np.asarray(scenario.goals), params)
