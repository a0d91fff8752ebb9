"""Quantitative comparison of the render modes: image metrics, the marker
disparity probe, and the benchmark sweep.

Pass counts are the primary performance proxy; wall times are measured and
reported but never asserted, since they depend entirely on the host.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, ProbeMissError
from .geometry import Eye, HeadPose, ScreenConfig
from .images import CanvasImage
from .projection import StereoCanvas, render_scs
from .render import render_oracle
from .scene import Scene
from .stitch import StitchConfig, render_stitch

BENCH_CSV_HEADER = (
    "mode", "head_x", "head_y", "head_z", "ipd", "cube_res", "slits",
    "passes", "wall_ms", "rmse", "mean_abs", "max_abs",
)

MODES = ("scs", "stitch", "oracle")


@dataclass(frozen=True)
class DiffReport:
    rmse: float
    mean_abs: float
    max_abs: float
    differing_pixel_fraction: float


def image_diff(a: CanvasImage, b: CanvasImage) -> DiffReport:
    """Channel metrics over normalized values; symmetric in its arguments."""
    if a.pixels.shape != b.pixels.shape:
        raise InputDomainError(
            f"image dimensions differ: {a.pixels.shape} vs {b.pixels.shape}"
        )
    da = a.pixels.astype(np.float64) / 255.0
    db = b.pixels.astype(np.float64) / 255.0
    diff = np.abs(da - db)
    return DiffReport(
        rmse=float(np.sqrt(np.mean(diff**2))),
        mean_abs=float(np.mean(diff)),
        max_abs=float(np.max(diff)),
        differing_pixel_fraction=float(np.mean(np.any(a.pixels != b.pixels, axis=-1))),
    )


def stereo_diff(a: StereoCanvas, b: StereoCanvas) -> DiffReport:
    """image_diff over the concatenated left+right pair."""
    join_a = CanvasImage(np.concatenate([a.left.pixels, a.right.pixels], axis=1))
    join_b = CanvasImage(np.concatenate([b.left.pixels, b.right.pixels], axis=1))
    return image_diff(join_a, join_b)


def disparity_probe(stereo: StereoCanvas, marker_color) -> float:
    """Signed horizontal disparity of an exact-color marker, in pixels.

    Returns the centroid column of exactly matching pixels in the left eye
    minus the right eye. Positive values mean the feature sits further
    "clockwise" in the left image, the convention for objects nearer than
    the screen in this frame.
    """
    color = np.asarray(marker_color, dtype=np.uint8)
    if color.shape != (3,):
        raise InputDomainError(f"marker color must be an RGB8 triple, got {marker_color!r}")
    centroids = []
    for name, image in (("left", stereo.left), ("right", stereo.right)):
        mask = np.all(image.pixels == color, axis=-1)
        if not mask.any():
            raise ProbeMissError(f"marker color {tuple(color)} absent from the {name} eye")
        centroids.append(float(np.nonzero(mask)[1].mean()))
    return centroids[0] - centroids[1]


@dataclass(frozen=True)
class BenchRow:
    mode: str
    head: HeadPose
    cube_res: int | None
    slits: int | None
    passes: int
    wall_ms: float
    diff: DiffReport


def bench_sweep(
    scene: Scene,
    screen: ScreenConfig,
    heads: list[HeadPose],
    modes: list[str],
    cube_resolutions: tuple[int, ...] = (256,),
    slit_counts: tuple[int, ...] = (32,),
    oracle_supersample: int = 1,
) -> list[BenchRow]:
    """One row per (mode, head, mode-specific resolution), in that order.

    Every row's stereo output is diffed against a per-head oracle render;
    wall times cover the row's own render only.
    """
    if not heads or not modes:
        raise InputDomainError("bench_sweep needs at least one head pose and one mode")
    for mode in modes:
        if mode not in MODES:
            raise InputDomainError(f"unknown bench mode {mode!r} (expected one of {MODES})")

    references: dict[HeadPose, StereoCanvas] = {}

    def reference(head: HeadPose) -> StereoCanvas:
        if head not in references:
            references[head] = StereoCanvas(
                render_oracle(scene, head, screen, Eye.LEFT, oracle_supersample),
                render_oracle(scene, head, screen, Eye.RIGHT, oracle_supersample),
                screen,
                head,
            )
        return references[head]

    rows: list[BenchRow] = []
    for mode in modes:
        for head in heads:
            if mode == "scs":
                for res in cube_resolutions:
                    t0 = time.perf_counter()
                    stereo, passes = render_scs(scene, head, screen, res)
                    wall = (time.perf_counter() - t0) * 1000.0
                    rows.append(BenchRow(mode, head, res, None, passes, wall,
                                         stereo_diff(stereo, reference(head))))
            elif mode == "stitch":
                for n in slit_counts:
                    config = StitchConfig.for_screen(n, screen)
                    t0 = time.perf_counter()
                    stereo, passes = render_stitch(scene, head, screen, config, stereo=True)
                    wall = (time.perf_counter() - t0) * 1000.0
                    rows.append(BenchRow(mode, head, None, n, passes, wall,
                                         stereo_diff(stereo, reference(head))))
            else:
                t0 = time.perf_counter()
                stereo = StereoCanvas(
                    render_oracle(scene, head, screen, Eye.LEFT),
                    render_oracle(scene, head, screen, Eye.RIGHT),
                    screen,
                    head,
                )
                wall = (time.perf_counter() - t0) * 1000.0
                rows.append(BenchRow(mode, head, None, None, 2, wall,
                                     stereo_diff(stereo, reference(head))))
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    """Rows in the fixed, documented column order; blank cells where not applicable."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_CSV_HEADER)
    for row in rows:
        x, y, z = row.head.position
        writer.writerow([
            row.mode,
            f"{x:.6g}", f"{y:.6g}", f"{z:.6g}", f"{row.head.ipd:.6g}",
            row.cube_res if row.cube_res is not None else "",
            row.slits if row.slits is not None else "",
            row.passes,
            f"{row.wall_ms:.3f}",
            f"{row.diff.rmse:.8f}", f"{row.diff.mean_abs:.8f}", f"{row.diff.max_abs:.8f}",
        ])
    return buf.getvalue()
