"""Figures for benchmark sweeps, written next to the CSV output.

Uses the Agg backend so reports render identically headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .analysis import BenchRow


def _row_label(row: BenchRow) -> str:
    if row.mode == "scs":
        return f"scs r{row.cube_res}"
    if row.mode == "stitch":
        return f"stitch N{row.slits}"
    return "oracle"


def write_bench_figures(rows: list[BenchRow], directory: str) -> list[str]:
    """Write the standard sweep figures; returns the created file paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    labels = [_row_label(r) for r in rows]
    index = range(len(rows))

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(rows) + 1.5), 3.2))
    ax.bar(index, [r.passes for r in rows], color="#4878cf")
    ax.set_xticks(index, labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("render passes")
    ax.set_title("Render passes per configuration")
    fig.tight_layout()
    path = os.path.join(directory, "bench_passes.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(rows) + 1.5), 3.2))
    ax.bar(index, [r.diff.mean_abs for r in rows], color="#d65f5f")
    ax.set_xticks(index, labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean abs error vs oracle")
    ax.set_title("Error against the raytrace oracle")
    fig.tight_layout()
    path = os.path.join(directory, "bench_error.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(rows) + 1.5), 3.2))
    ax.bar(index, [r.wall_ms for r in rows], color="#6acc65")
    ax.set_xticks(index, labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("wall time (ms)")
    ax.set_title("Wall time per configuration (advisory)")
    fig.tight_layout()
    path = os.path.join(directory, "bench_wall_ms.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths
