"""Offline rendering of run artifacts produced by the fmp simulator."""

from .artifacts import RunData, load_run
from .render import render_animation, render_separation_curve, render_static, separation_series

__all__ = [
    "RunData",
    "load_run",
    "render_animation",
    "render_separation_curve",
    "render_static",
    "separation_series",
]
