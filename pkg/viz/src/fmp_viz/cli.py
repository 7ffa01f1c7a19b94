"""Plotting command line: render run artifacts to image/video files."""

from __future__ import annotations

import sys

import click

from .artifacts import ArtifactError, load_run
from .render import render_animation, render_separation_curve, render_static


@click.command("plot")
@click.option("--input", "input_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option(
    "--mode",
    required=True,
    type=click.Choice(["static", "animation", "separation-curve"]),
)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--stride", type=int, default=1, show_default=True, help="Animation frame stride.")
def main(input_dir, mode, out_path, stride):
    """Render one run directory (trajectory.csv + metrics.json) to OUT."""
    try:
        data = load_run(input_dir)
        if mode == "static":
            render_static(data, out_path)
        elif mode == "animation":
            frames = render_animation(data, out_path, stride=stride)
            click.echo(f"wrote {out_path} ({frames} frames)")
            return
        else:
            minimum = render_separation_curve(data, out_path)
            click.echo(f"wrote {out_path} (curve minimum {minimum:.6g} m)")
            return
    except ArtifactError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
