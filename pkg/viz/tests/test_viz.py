"""Rendering: artifact loading, all three modes, metrics consistency."""

import json
import math
import os

import numpy as np
import pytest
from click.testing import CliRunner

from fmp_viz.artifacts import ArtifactError, load_run
from fmp_viz.cli import main
from fmp_viz.render import (
    animation_frame_indices,
    render_animation,
    render_separation_curve,
    render_static,
    separation_series,
)


class TestLoadRun:
    def test_loads_shapes(self, two_agent_run_dir):
        data = load_run(two_agent_run_dir)
        assert data.n == 2 and data.dim == 2
        assert data.positions.shape == data.velocities.shape
        assert len(data.times) == data.positions.shape[0]
        assert data.d_star == 1.0
        assert data.goals is not None and data.goals.shape == (2, 2)

    def test_missing_inputs_error(self, tmp_path):
        with pytest.raises(ArtifactError, match="missing"):
            load_run(tmp_path)

    def test_mismatched_n_error(self, two_agent_run_dir, tmp_path):
        for name in ("trajectory.csv", "metrics.json"):
            (tmp_path / name).write_text((two_agent_run_dir / name).read_text())
        meta = json.loads((tmp_path / "metrics.json").read_text())
        meta["n"] = 5
        (tmp_path / "metrics.json").write_text(json.dumps(meta))
        with pytest.raises(ArtifactError, match="disagree"):
            load_run(tmp_path)

    def test_never_mutates_inputs(self, two_agent_run_dir, tmp_path):
        before = {
            name: (two_agent_run_dir / name).read_bytes()
            for name in os.listdir(two_agent_run_dir)
        }
        data = load_run(two_agent_run_dir)
        render_static(data, tmp_path / "out.png")
        render_separation_curve(data, tmp_path / "sep.png")
        after = {
            name: (two_agent_run_dir / name).read_bytes()
            for name in os.listdir(two_agent_run_dir)
        }
        assert before == after


class TestSeparationSeries:
    def test_matches_metrics_min_separation(self, two_agent_run_dir):
        data = load_run(two_agent_run_dir)
        series = separation_series(data)
        recorded = data.metrics["metrics"]["min_separation"]
        assert float(np.min(series)) == pytest.approx(recorded, abs=1e-9)

    def test_single_agent_is_inf(self, two_agent_run_dir):
        data = load_run(two_agent_run_dir)
        lone = type(data)(
            times=data.times,
            positions=data.positions[:, :1],
            velocities=data.velocities[:, :1],
            metrics={},
            scenario=None,
        )
        assert math.isinf(separation_series(lone)[0])


class TestRenderModes:
    def test_static_png(self, two_agent_run_dir, tmp_path):
        out = tmp_path / "traj.png"
        render_static(load_run(two_agent_run_dir), out)
        assert out.stat().st_size > 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_separation_curve_returns_minimum(self, two_agent_run_dir, tmp_path):
        data = load_run(two_agent_run_dir)
        out = tmp_path / "sep.png"
        minimum = render_separation_curve(data, out)
        assert out.stat().st_size > 0
        assert minimum == pytest.approx(
            data.metrics["metrics"]["min_separation"], abs=1e-9
        )

    def test_animation_frame_count(self, two_agent_run_dir, tmp_path):
        data = load_run(two_agent_run_dir)
        stride = 25
        expected = math.ceil(len(data.times) / stride)
        assert len(animation_frame_indices(len(data.times), stride)) == expected
        out = tmp_path / "anim.mp4"
        frames = render_animation(data, out, stride=stride)
        assert frames == expected
        assert out.stat().st_size > 0

    def test_3d_animation(self, three_d_run_dir, tmp_path):
        data = load_run(three_d_run_dir)
        assert data.dim == 3
        out = tmp_path / "anim3d.mp4"
        frames = render_animation(data, out, stride=50)
        assert frames == math.ceil(len(data.times) / 50)
        assert out.stat().st_size > 0

    def test_bad_stride_rejected(self, two_agent_run_dir, tmp_path):
        data = load_run(two_agent_run_dir)
        with pytest.raises(ArtifactError):
            render_animation(data, tmp_path / "x.mp4", stride=0)


class TestCli:
    @pytest.fixture()
    def runner(self):
        return CliRunner()

    def test_all_modes(self, runner, two_agent_run_dir, tmp_path):
        for mode, name in (
            ("static", "a.png"),
            ("separation-curve", "b.png"),
            ("animation", "c.mp4"),
        ):
            out = tmp_path / name
            result = runner.invoke(
                main,
                ["--input", str(two_agent_run_dir), "--mode", mode, "--out", str(out), "--stride", "25"],
            )
            assert result.exit_code == 0, result.output
            assert out.stat().st_size > 0

    def test_missing_artifacts_exit_1(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["--input", str(tmp_path), "--mode", "static", "--out", str(tmp_path / "x.png")],
        )
        assert result.exit_code == 1
        assert "error:" in result.output
