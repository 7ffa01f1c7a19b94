"""Shared fixtures: real artifact directories produced by the simulator.

The viz tests deliberately exercise the real artifact format, so they
depend on the fmp package (the reverse dependency does not exist).
"""

import pytest

from fmp.artifacts import write_run_artifacts
from fmp.core import PerAxisLimit, Scenario
from fmp.simulator import run


@pytest.fixture(scope="session")
def two_agent_run_dir(tmp_path_factory):
    scenario = Scenario(
        dim=2,
        starts=((0.0, 0.0), (20.0, 2.0)),
        goals=((20.0, 2.0), (0.0, 0.0)),
        preassigned=True,
        overrides=(("d_star", 1.0), ("v_max", 5.0)),
    )
    result = run(scenario, log_every=1)
    assert result.converged
    outdir = tmp_path_factory.mktemp("run2d")
    write_run_artifacts(result, scenario, outdir)
    return outdir


@pytest.fixture(scope="session")
def three_d_run_dir(tmp_path_factory):
    scenario = Scenario(
        dim=3,
        starts=((0.0, 0.0, 0.0), (20.0, 2.0, 4.0)),
        goals=((20.0, 2.0, 4.0), (0.0, 0.0, 0.0)),
        preassigned=True,
        overrides=(
            ("d_star", 1.0),
            ("v_max", PerAxisLimit(horizontal=5.0, up=3.0, down=3.0)),
        ),
    )
    result = run(scenario, log_every=1)
    assert result.converged
    outdir = tmp_path_factory.mktemp("run3d")
    write_run_artifacts(result, scenario, outdir)
    return outdir
