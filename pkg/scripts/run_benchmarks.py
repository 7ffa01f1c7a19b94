#!/usr/bin/env python3
"""Run every shipped scenario file and print a convergence summary table."""

import argparse
import glob
import os
import time

from fmp.core import load_scenario
from fmp.simulator import run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--scenarios",
        default=os.path.join(os.path.dirname(__file__), "..", "scenarios"),
    )
    parser.add_argument("--log-every", type=int, default=50)
    args = parser.parse_args()

    paths = sorted(glob.glob(os.path.join(args.scenarios, "*.json")))
    if not paths:
        raise SystemExit(f"no scenario files in {args.scenarios}")

    print("scenario,n,converged,transition_time_s,lbt_opt_s,min_separation_m,wall_s")
    for path in paths:
        scenario = load_scenario(path)
        t0 = time.perf_counter()
        result = run(scenario, log_every=args.log_every)
        wall = time.perf_counter() - t0
        m = result.metrics
        tt = "" if m.transition_time is None else f"{m.transition_time:.2f}"
        print(
            f"{scenario.name},{scenario.n},{result.converged},{tt},"
            f"{m.lbt_opt:.2f},{m.min_separation:.4g},{wall:.1f}"
        )


if __name__ == "__main__":
    main()
