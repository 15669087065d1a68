"""Plot emission for evaluation reports and trajectory maps.

The optional plot config (key-value file) carries the meters-to-pixels
conversion for overlaying results on floor-plan images; without it, plots
stay in meters.
"""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _to_pixels(xy: np.ndarray, config: dict) -> np.ndarray:
    scale = float(config.get("meters_per_pixel", 1.0))
    origin = np.array([
        float(config.get("origin_x_px", 0.0)),
        float(config.get("origin_y_px", 0.0)),
    ])
    px = xy / scale + origin
    if config.get("flip_y", "false").lower() in ("true", "1", "yes"):
        px[:, 1] = -px[:, 1]
    return px


def plot_map(trajectory, segments, out_path, plot_config=None) -> None:
    """Top-down view of the trajectory against the predetermined segments."""
    plt = _plt()
    positions = np.array([p.position[:2] for p in trajectory])
    unit = "m"
    if plot_config:
        positions = _to_pixels(positions, plot_config)
        unit = "px"
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.plot(positions[:, 0], positions[:, 1], "k.", markersize=2,
            label="estimated")
    for seg in segments:
        ends = np.array([seg.start[:2], seg.end[:2]])
        if plot_config:
            ends = _to_pixels(ends, plot_config)
        ax.plot(ends[:, 0], ends[:, 1], "g-", linewidth=2)
    ax.plot([], [], "g-", label="path")
    ax.set_xlabel(f"x [{unit}]")
    ax.set_ylabel(f"y [{unit}]")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def cell_label(cell) -> str:
    if cell is None:
        return "-"
    parts = []
    for name, value in (("C", cell.closest_count), ("U", cell.survivors),
                        ("q", cell.q)):
        if value is not None:
            parts.append(f"{name}={value:g}" if isinstance(value, float)
                         else f"{name}={value}")
    return " ".join(parts) if parts else "raw"


def plot_sweep(reports, out_path) -> None:
    """Boxplots of per-point deviations for each sweep cell."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(reports)), 4.5))
    ax.boxplot(
        [r.distances for r in reports],
        tick_labels=[cell_label(r.params) for r in reports],
        showfliers=False,
    )
    penalized = [r.penalized_median for r in reports]
    ax.plot(range(1, len(reports) + 1), penalized, "r^",
            label="penalized median")
    ax.set_ylabel("deviation [m]")
    ax.tick_params(axis="x", rotation=45)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
