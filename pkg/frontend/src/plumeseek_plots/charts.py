"""Chart builders: sweep comparisons and 3D trajectory scenes.

Each builder writes an image and returns the exact data series it drew,
so callers can verify the figure against the source records without
rasterizing anything.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .io import SweepTable, load_sweep_table, read_trajectory  # noqa: E402

__all__ = ["SweepChart", "TrajectoryScene", "plot_sweep",
           "plot_trajectory3d"]

_METRICS = {
    "mst": ("mean_search_time", "mean search time (s)"),
    "sr": ("success_rate", "success rate"),
}


@dataclass(frozen=True)
class SweepChart:
    table: SweepTable
    metric: str
    # variant -> one value per swept setting, None where the metric is
    # undefined (no successful runs); exactly what the bars show.
    series: dict[str, list[float | None]]
    path: str


def plot_sweep(summary_paths: list[str], metric: str,
               out_path: str) -> SweepChart:
    """Grouped bar chart of one metric across a swept key, one series
    per variant. Missing mean search times are left as gaps."""
    if metric not in _METRICS:
        raise ValueError(f"metric must be one of {sorted(_METRICS)}")
    table = load_sweep_table(summary_paths)
    values = table.values
    variants = table.variants
    series: dict[str, list[float | None]] = {}
    for variant in variants:
        points: list[float | None] = []
        for value in values:
            row = table.lookup(value, variant)
            if row is None:
                points.append(None)
            else:
                points.append(row.mst if metric == "mst" else row.sr)
        series[variant] = points

    _, label = _METRICS[metric]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    x = np.arange(len(values), dtype=float)
    width = 0.8 / max(len(variants), 1)
    for i, variant in enumerate(variants):
        heights = [np.nan if p is None else p for p in series[variant]]
        ax.bar(x + (i - (len(variants) - 1) / 2.0) * width, heights,
               width=width * 0.92, label=variant)
    ax.set_xticks(x)
    ax.set_xticklabels(values)
    ax.set_xlabel(table.key)
    ax.set_ylabel(label)
    if metric == "sr":
        ax.set_ylim(0.0, 1.0)
    ax.set_title(f"{label} by {table.key}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return SweepChart(table, metric, series, out_path)


@dataclass(frozen=True)
class TrajectoryScene:
    # agent id -> (k, 3) sensing positions in iteration order
    agent_paths: dict[int, np.ndarray]
    cue_points: np.ndarray
    source: tuple[float, float, float] | None
    path: str


def plot_trajectory3d(trajectory_path: str, out_path: str
                      ) -> TrajectoryScene:
    """3D scene: one polyline per agent, dots where cues were captured,
    and a star on the true source. An episode with no rows still renders
    the source marker."""
    traj = read_trajectory(trajectory_path)
    paths = {a: traj.agent_path(a) for a in traj.agents}
    cues = traj.cue_points()
    source = traj.source()

    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    for agent_id, xyz in paths.items():
        ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2],
                label=f"agent {agent_id}")
    if len(cues):
        ax.scatter(cues[:, 0], cues[:, 1], cues[:, 2], s=18, c="black",
                   depthshade=False, label="cue captured")
    if source is not None:
        ax.scatter([source[0]], [source[1]], [source[2]], marker="*",
                   s=160, c="red", depthshade=False, label="source")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_zlabel("z (m)")
    if paths or len(cues) or source is not None:
        ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return TrajectoryScene(paths, cues, source, out_path)
