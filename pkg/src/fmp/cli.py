"""Benchmark command-line interface.

Exit codes: 0 = run converged, 2 = run finished without converging,
1 = fault or configuration error.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import scenarios as gen
from .artifacts import (
    RUN_CONFIG_JSON,
    SCENARIO_JSON,
    TRAJECTORY_JSONL,
    write_run_artifacts,
)
from .controller import SimulationFault
from .core import ScenarioError, UniformLimit, PerAxisLimit, load_scenario, save_scenario
from .simulator import run as run_sim

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("FMP_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _override_options(f):
    options = [
        click.option("--d-star", type=float, default=None, help="Required minimum separation (m)."),
        click.option("--v-max", type=float, default=None, help="Uniform speed limit (m/s)."),
        click.option("--c1", type=float, default=None, help="Position feedback gain (1/s^2)."),
        click.option("--c2", type=float, default=None, help="Velocity damping gain (1/s)."),
        click.option("--rho", type=float, default=None, help="Repulsive gradient."),
        click.option("--dt", type=float, default=None, help="Step size (s)."),
        click.option("--end-max-dis", type=float, default=None, help="Convergence distance (m)."),
        click.option("--max-sim-time", type=float, default=None, help="Simulated time budget (s)."),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


def _collect_overrides(**kw) -> dict:
    return {k: v for k, v in kw.items() if v is not None}


@click.group()
def main():
    """Force-based motion planning simulator and benchmark harness."""


@main.command("run")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", "outdir", required=True, type=click.Path())
@click.option("--log-every", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Echoed into artifacts for replay bookkeeping.")
@click.option("--threads", type=int, default=None, help="Worker count (FMP_THREADS fallback); never changes results.")
@click.option("--neighbors", type=click.Choice(["auto", "brute", "tree"]), default="auto", show_default=True)
@_override_options
def cmd_run(scenario_path, outdir, log_every, seed, threads, neighbors, **overrides):
    """Run one scenario file and write trajectory + metrics artifacts."""
    sys.exit(
        _execute_run(
            scenario_path,
            outdir,
            log_every=log_every,
            seed=seed,
            threads=_threads(threads),
            neighbors=neighbors,
            overrides=_collect_overrides(**overrides),
        )
    )


def _execute_run(scenario_path, outdir, *, log_every, seed, threads, neighbors, overrides) -> int:
    try:
        scenario = load_scenario(scenario_path)
        result = run_sim(
            scenario,
            overrides,
            log_every=log_every,
            neighbor_mode=neighbors,
            workers=threads,
        )
    except (ScenarioError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_ERROR
    run_config = {
        "scenario": SCENARIO_JSON,
        "overrides": overrides,
        "log_every": log_every,
        "neighbors": neighbors,
        "seed": seed,
    }
    write_run_artifacts(result, scenario, outdir, seed=seed, run_config=run_config)
    if result.fault:
        click.echo(f"fault: {result.fault}", err=True)
        return EXIT_ERROR
    m = result.metrics
    click.echo(
        f"{scenario.name}: converged={result.converged} "
        f"transition={m.transition_time} s steps={m.steps} "
        f"min_separation={m.min_separation:.4g} m"
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


@main.command("gen")
@click.argument("kind", type=click.Choice(["circle", "swap", "random", "obstacle", "formation"]))
@click.option("--out", "outpath", required=True, type=click.Path())
@click.option("--n", type=int, default=None)
@click.option("--radius", type=float, default=None, help="Circle radius (auto-sized when omitted).")
@click.option("--kind-swap", "swap_kind", type=click.Choice(["mirror", "diagonal"]), default="mirror", show_default=True)
@click.option("--spacing", type=float, default=None)
@click.option("--box", type=str, default="40x40", show_default=True, help="Box extents, e.g. 40x40 or 60x60x30.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--d-star", type=float, default=None)
@click.option("--v-max", type=float, default=None)
def cmd_gen(kind, outpath, n, radius, swap_kind, spacing, box, seed, d_star, v_max):
    """Emit a scenario JSON file from a built-in generator."""
    try:
        scenario = _generate(kind, n, radius, swap_kind, spacing, box, seed, d_star, v_max)
    except ScenarioError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    save_scenario(scenario, outpath)
    click.echo(f"wrote {outpath} ({scenario.name}, n={scenario.n})")


def _generate(kind, n, radius, swap_kind, spacing, box, seed, d_star, v_max):
    if kind == "circle":
        n = n or 100
        d_star = d_star if d_star is not None else 3.0
        v_max = v_max if v_max is not None else 15.0
        if radius is None:
            radius = gen.min_circle_radius(n, d_star, v_max, spacing_factor=1.5)
        return gen.circle_scenario(n, radius, d_star=d_star, v_max=v_max)
    if kind == "swap":
        return gen.grid_swap_scenario(
            swap_kind,
            n or 100,
            spacing if spacing is not None else 9.5,
            d_star=d_star if d_star is not None else 5.0,
            v_max=v_max if v_max is not None else 15.0,
        )
    if kind == "random":
        extents = tuple(float(x) for x in box.lower().split("x"))
        spec = gen.RandomCaseSpec(n=n or 30, box=extents, seed=seed)
        return gen.random_scenario(
            spec,
            d_star=d_star if d_star is not None else 5.0,
            v_max=v_max if v_max is not None else 3.0,
        )
    if kind == "obstacle":
        return gen.obstacle_passage_scenario()
    if kind == "formation":
        return gen.formation_scenario(
            n or 28,
            spacing if spacing is not None else 12.0,
            d_star=d_star if d_star is not None else 0.4,
            v_max=v_max if v_max is not None else 10.0,
        )
    raise ScenarioError(f"unknown generator {kind!r}")


def _bench_rows(suite, n_list, cases, seed, swap_kind, spacings, neighbors):
    """Yield (label, scenario) pairs for one suite."""
    if suite == "circle":
        for n in n_list or [100]:
            radius = gen.min_circle_radius(n, 3.0, 15.0, spacing_factor=1.5)
            yield f"circle n={n}", gen.circle_scenario(n, radius, d_star=3.0, v_max=15.0)
    elif suite == "scale":
        for n in n_list or [10, 100, 250, 500, 1000]:
            # Stiff repulsion keeps the derived spacing (and with it the
            # circle radius, which grows through xi) small enough that the
            # thousand-agent run stays tractable.
            rho = 7.5e9
            radius = gen.min_circle_radius(n, 5.0, 15.0, rho=rho, spacing_factor=1.3)
            yield f"scale n={n}", gen.circle_scenario(
                n, radius, d_star=5.0, v_max=15.0, extra={"rho": rho}
            )
    elif suite == "swap":
        for spacing in spacings or [6.0, 6.5, 7.5, 8.5, 9.5]:
            yield (
                f"{swap_kind} swap spacing={spacing:g}",
                # Jitter breaks the exact-grid symmetry that would otherwise
                # confine each row to a line; dense spacings need far more
                # simulated time than the default budget allows.
                gen.grid_swap_scenario(
                    swap_kind, 100, spacing, jitter=0.05,
                    extra={"max_sim_time": 600.0},
                ),
            )
    elif suite == "random":
        for case in range(cases):
            spec = gen.RandomCaseSpec(n=30, box=(40.0, 40.0), seed=seed + case)
            yield f"random case={case}", gen.random_scenario(spec)
    elif suite == "obstacle":
        yield "obstacle passage", gen.obstacle_passage_scenario()
    elif suite == "formation":
        for spacing in spacings or [12.0, 8.0, 4.0, 2.0, 1.0]:
            yield f"formation spacing={spacing:g}", gen.formation_scenario(28, spacing)
    elif suite == "scale3d":
        spec = gen.RandomCaseSpec(n=100, box=(60.0, 60.0, 30.0), seed=seed)
        limit = PerAxisLimit(horizontal=9.0, up=3.0, down=6.0)
        yield "random 3d n=100", gen.random_scenario(spec, d_star=3.0, v_max=limit)
    else:
        raise ScenarioError(f"unknown suite {suite!r}")


@main.command("bench")
@click.argument(
    "suite",
    type=click.Choice(["circle", "scale", "swap", "obstacle", "random", "formation", "scale3d"]),
)
@click.option("--n", "n_csv", type=str, default=None, help="Comma-separated agent counts.")
@click.option("--cases", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--kind", "swap_kind", type=click.Choice(["mirror", "diagonal"]), default="mirror", show_default=True)
@click.option("--spacing", "spacing_csv", type=str, default=None, help="Comma-separated spacings (m).")
@click.option("--out", "outdir", type=click.Path(), default=None, help="Write summary.csv here.")
@click.option("--threads", type=int, default=None, help="Concurrent runs (FMP_THREADS fallback).")
@click.option("--neighbors", type=click.Choice(["auto", "brute", "tree"]), default="auto", show_default=True)
def cmd_bench(suite, n_csv, cases, seed, swap_kind, spacing_csv, outdir, threads, neighbors):
    """Run a built-in benchmark suite and print its summary table."""
    n_list = [int(x) for x in n_csv.split(",")] if n_csv else None
    spacings = [float(x) for x in spacing_csv.split(",")] if spacing_csv else None
    try:
        jobs = list(_bench_rows(suite, n_list, cases, seed, swap_kind, spacings, neighbors))
    except ScenarioError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)

    def one(job):
        label, scenario = job
        result = run_sim(scenario, log_every=50, neighbor_mode=neighbors)
        return label, scenario, result

    workers = max(1, _threads(threads))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(job) for job in jobs]

    header = (
        "label,n,converged,deadlock,transition_time_s,execution_time_ms,"
        "min_separation_m,lbt_opt_s"
    )
    lines = [header]
    deadlocks = 0
    for label, scenario, result in results:
        m = result.metrics
        deadlocks += int(m.deadlock)
        lines.append(
            f"{label},{scenario.n},{result.converged},{m.deadlock},"
            f"{'' if m.transition_time is None else f'{m.transition_time:.2f}'},"
            f"{m.execution_time_ms:.0f},{m.min_separation:.4g},{m.lbt_opt:.2f}"
        )
    table = "\n".join(lines)
    click.echo(table)
    if suite == "random":
        click.echo(f"total deadlocks: {deadlocks}")
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "summary.csv"), "w") as f:
            f.write(table + "\n")
    sys.exit(EXIT_OK if all(r.converged for _, _, r in results) else EXIT_NOT_CONVERGED)


@main.command("replay-check")
@click.option("--dir", "rundir", required=True, type=click.Path(exists=True))
def cmd_replay_check(rundir):
    """Re-run a recorded configuration and diff its trajectory byte-wise."""
    try:
        with open(os.path.join(rundir, RUN_CONFIG_JSON)) as f:
            config = json.load(f)
    except FileNotFoundError:
        click.echo("error: no run_config.json in the given directory", err=True)
        sys.exit(EXIT_ERROR)
    scenario = load_scenario(os.path.join(rundir, config["scenario"]))
    result = run_sim(
        scenario,
        config.get("overrides") or {},
        log_every=config.get("log_every", 1),
        neighbor_mode=config.get("neighbors", "auto"),
    )
    from .artifacts import record_to_json_line

    replayed = "".join(record_to_json_line(rec) + "\n" for rec in result.trajectory)
    with open(os.path.join(rundir, TRAJECTORY_JSONL)) as f:
        original = f.read()
    if replayed == original:
        click.echo("replay-check: identical")
        sys.exit(EXIT_OK)
    click.echo("replay-check: DIVERGED", err=True)
    sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
