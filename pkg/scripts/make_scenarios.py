#!/usr/bin/env python3
"""Regenerate the shipped benchmark scenario files in scenarios/.

Every file is produced by a deterministic generator, so re-running this
script always reproduces identical JSON.
"""

import argparse
import os

from fmp import scenarios as gen
from fmp.core import save_scenario


def build_all():
    circle_radius = gen.min_circle_radius(100, 3.0, 15.0, spacing_factor=1.5)
    sparse_radius = gen.min_circle_radius(100, 3.0, 15.0, spacing_factor=3.0)
    return {
        "circle100.json": gen.circle_scenario(
            100, circle_radius, d_star=3.0, v_max=15.0
        ),
        "circle100_sparse.json": gen.circle_scenario(
            100, sparse_radius, d_star=3.0, v_max=15.0
        ),
        "random30_seed0.json": gen.random_scenario(
            gen.RandomCaseSpec(n=30, box=(40.0, 40.0), seed=0)
        ),
        "obstacle_passage.json": gen.obstacle_passage_scenario(),
        "formation28.json": gen.formation_scenario(28, 12.0),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--outdir",
        default=os.path.join(os.path.dirname(__file__), "..", "scenarios"),
    )
    args = parser.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for filename, scenario in build_all().items():
        path = os.path.join(args.outdir, filename)
        save_scenario(scenario, path)
        print(f"wrote {path} ({scenario.name}, n={scenario.n})")


if __name__ == "__main__":
    main()
