"""Rendering backends for the three plot modes.

All figures are rendered off-screen (Agg); animation output is MP4 via
ffmpeg when available, with a Pillow GIF fallback.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import ArtifactError, RunData


def separation_series(data: RunData) -> np.ndarray:
    """Per-logged-step minimum pairwise distance (inf for single agents)."""
    steps, n, _ = data.positions.shape
    if n < 2:
        return np.full(steps, np.inf)
    iu, ju = np.triu_indices(n, k=1)
    delta = data.positions[:, ju] - data.positions[:, iu]
    return np.min(np.sqrt(np.sum(delta * delta, axis=2)), axis=1)


def _make_axes(dim: int):
    fig = plt.figure(figsize=(8.0, 8.0))
    if dim == 3:
        ax = fig.add_subplot(projection="3d")
        ax.set_zlabel("z (m)")
    else:
        ax = fig.add_subplot()
        ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    return fig, ax


def _draw_obstacles(ax, data: RunData):
    if data.dim != 2:
        return
    for center, radius in data.obstacles:
        ax.add_patch(
            plt.Circle(center, radius, facecolor="0.85", edgecolor="0.4", zorder=0)
        )


def _draw_endpoints(ax, data: RunData):
    starts = data.positions[0]
    ax.scatter(*starts.T, marker="o", s=30, color="tab:green", label="start", zorder=3)
    goals = data.goals
    if goals is not None:
        ax.scatter(*goals.T, marker="*", s=60, color="tab:red", label="goal", zorder=3)


def render_static(data: RunData, out_path) -> None:
    """One polyline per agent over the whole run, plus start/goal markers."""
    fig, ax = _make_axes(data.dim)
    _draw_obstacles(ax, data)
    for i in range(data.n):
        ax.plot(*data.positions[:, i].T, linewidth=0.8)
    _draw_endpoints(ax, data)
    ax.legend(loc="upper right")
    ax.set_title(f"trajectories (n={data.n})")
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def animation_frame_indices(steps: int, stride: int) -> range:
    """Strided frame selection: ceil(steps / stride) frames."""
    if stride < 1:
        raise ArtifactError(f"stride must be >= 1, got {stride}")
    return range(0, steps, stride)


def render_animation(data: RunData, out_path, stride: int = 1) -> int:
    """Scatter animation, one frame per strided step; returns frame count.

    ``.mp4`` output is encoded with OpenCV; ``.gif`` with Pillow.
    """
    frames = animation_frame_indices(len(data.times), stride)
    out_path = str(out_path)
    if out_path.endswith(".mp4"):
        sink = _Mp4Sink(out_path)
    elif out_path.endswith(".gif"):
        sink = _GifSink(out_path)
    else:
        raise ArtifactError(f"animation output must be .mp4 or .gif, got {out_path}")

    fig, ax = _make_axes(data.dim)
    _draw_obstacles(ax, data)
    _draw_endpoints(ax, data)

    lo = data.positions.min(axis=(0, 1))
    hi = data.positions.max(axis=(0, 1))
    pad = 0.05 * np.max(hi - lo + 1e-9)
    ax.set_xlim(lo[0] - pad, hi[0] + pad)
    ax.set_ylim(lo[1] - pad, hi[1] + pad)
    if data.dim == 3:
        ax.set_zlim(lo[2] - pad, hi[2] + pad)
        scatter = ax.scatter(*data.positions[0].T, s=12, color="tab:blue")
    else:
        scatter = ax.scatter(*data.positions[0].T, s=12, color="tab:blue", zorder=2)

    for k in frames:
        pts = data.positions[k]
        if data.dim == 3:
            scatter._offsets3d = (pts[:, 0], pts[:, 1], pts[:, 2])
        else:
            scatter.set_offsets(pts)
        ax.set_title(f"t = {data.times[k]:.2f} s")
        fig.canvas.draw()
        rgba = np.asarray(fig.canvas.buffer_rgba())
        sink.add(rgba)
    sink.close()
    plt.close(fig)
    return len(frames)


class _Mp4Sink:
    def __init__(self, path: str, fps: int = 20):
        try:
            import cv2
        except ImportError:
            raise ArtifactError(
                "mp4 output needs OpenCV; use a .gif output path instead"
            ) from None
        self._cv2 = cv2
        self._path = path
        self._fps = fps
        self._writer = None

    def add(self, rgba: np.ndarray) -> None:
        if self._writer is None:
            h, w = rgba.shape[:2]
            fourcc = self._cv2.VideoWriter_fourcc(*"mp4v")
            self._writer = self._cv2.VideoWriter(self._path, fourcc, self._fps, (w, h))
            if not self._writer.isOpened():
                raise ArtifactError(f"could not open video writer for {self._path}")
        self._writer.write(self._cv2.cvtColor(rgba, self._cv2.COLOR_RGBA2BGR))

    def close(self) -> None:
        if self._writer is not None:
            self._writer.release()


class _GifSink:
    def __init__(self, path: str, fps: int = 20):
        from PIL import Image

        self._image_cls = Image
        self._path = path
        self._duration_ms = int(1000 / fps)
        self._frames = []

    def add(self, rgba: np.ndarray) -> None:
        self._frames.append(self._image_cls.fromarray(rgba[..., :3].copy()))

    def close(self) -> None:
        if not self._frames:
            raise ArtifactError("no frames to write")
        self._frames[0].save(
            self._path,
            save_all=True,
            append_images=self._frames[1:],
            duration=self._duration_ms,
            loop=0,
        )


def render_separation_curve(data: RunData, out_path) -> float:
    """Min-distance-over-time curve with a horizontal line at d*.

    Returns the curve's global minimum (equals the metrics file's
    min_separation when the run was logged at every step).
    """
    series = separation_series(data)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(data.times, series, color="tab:blue", label="min pairwise distance")
    d_star = data.d_star
    if d_star is not None:
        ax.axhline(d_star, color="tab:red", linestyle="--", label=f"d* = {d_star:g} m")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("distance (m)")
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="upper right")
    ax.set_title("minimum separation")
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    finite = series[np.isfinite(series)]
    return float(np.min(finite)) if len(finite) else math.inf
