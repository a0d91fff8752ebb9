"""Slit-stitching baseline: N planar off-axis renders pasted into the canvas.

The arc is partitioned into N equal azimuth segments; each segment is
approximated by its chord rectangle (corners on the screen, so adjacent
slits share an exact edge) and rendered through an off-axis frustum per
eye, with the eye offset evaluated at the slit's center azimuth. Canvas
columns map to slits by azimuth and to slit-image columns proportionally,
so no column is duplicated or dropped and boundary columns sample the
shared chord edge. Pass count is N per rendered eye, the comparator for
the cubemap pipeline's per-face passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError
from .geometry import (
    HeadPose,
    ScreenConfig,
    eye_positions,
    off_axis_frustum,
    validate_head,
)
from .images import CanvasImage
from .projection import StereoCanvas
from .render import render_planar
from .scene import Scene

#: Near/far plane distances for slit frusta; ray generation is independent
#: of the near value, these only bound the frustum metadata.
SLIT_NEAR = 0.05
SLIT_FAR = 1000.0


@dataclass(frozen=True)
class StitchConfig:
    """Slit count plus the horizontal resolution each slit is rendered at."""

    slit_count: int
    slit_width: int

    def __post_init__(self):
        if self.slit_count < 1:
            raise InputDomainError(f"slit_count must be >= 1, got {self.slit_count}")
        if self.slit_width < 1:
            raise InputDomainError(f"slit_width must be >= 1, got {self.slit_width}")

    @classmethod
    def for_screen(cls, slit_count: int, screen: ScreenConfig) -> "StitchConfig":
        """Slit width ceil(W/N), so N slits cover the canvas (last one cropped)."""
        return cls(slit_count, -(-screen.canvas_width // slit_count))


def slit_geometry(i: int, config: StitchConfig, screen: ScreenConfig) -> np.ndarray:
    """Chord rectangle of slit ``i``: (bottom-left, bottom-right, top-right, top-left).

    Corners lie on the cylinder at the slit's boundary azimuths, spanning
    the full screen height; adjacent slits share corner pairs exactly.
    """
    if not (0 <= i < config.slit_count):
        raise InputDomainError(f"slit index {i} outside [0, {config.slit_count})")
    step = screen.arc / config.slit_count
    t0 = math.radians(-screen.arc / 2 + i * step)
    t1 = math.radians(-screen.arc / 2 + (i + 1) * step)
    r, h = screen.radius, screen.height
    return np.array(
        [
            [r * math.sin(t0), 0.0, r * math.cos(t0)],
            [r * math.sin(t1), 0.0, r * math.cos(t1)],
            [r * math.sin(t1), h, r * math.cos(t1)],
            [r * math.sin(t0), h, r * math.cos(t0)],
        ]
    )


def _slit_columns(config: StitchConfig, screen: ScreenConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per canvas column: owning slit index and the slit-image column to copy.

    Columns belong to the slit containing their center azimuth; the position
    within the slit maps proportionally onto the slit image, so the first and
    last columns of a slit sample next to its chord edges.
    """
    w, n = screen.canvas_width, config.slit_count
    centers = (np.arange(w) + 0.5) * n / w
    slit = np.minimum(centers.astype(np.int64), n - 1)
    frac = centers - slit
    col = np.minimum((frac * config.slit_width).astype(np.int64), config.slit_width - 1)
    return slit, col


def render_stitch(
    scene: Scene,
    head: HeadPose,
    screen: ScreenConfig,
    config: StitchConfig,
    stereo: bool = True,
) -> tuple[StereoCanvas | CanvasImage, int]:
    """Render and stitch all slits; pass count is N * (2 if stereo else 1)."""
    validate_head(head, screen)
    if config.slit_count * config.slit_width < screen.canvas_width:
        raise InputDomainError(
            f"{config.slit_count} slits of width {config.slit_width} cannot cover "
            f"a {screen.canvas_width}-column canvas"
        )
    w, h = screen.canvas_width, screen.canvas_height
    slit_of_col, col_in_slit = _slit_columns(config, screen)
    hy = head.position[1]
    canvases = {
        eye: np.zeros((h, w, 3), dtype=np.uint8)
        for eye in (("left", "right") if stereo else ("mono",))
    }
    passes = 0
    for i in range(config.slit_count):
        corners = slit_geometry(i, config, screen)
        step = screen.arc / config.slit_count
        tc = math.radians(-screen.arc / 2 + (i + 0.5) * step)
        center_point = np.array(
            [screen.radius * math.sin(tc), hy, screen.radius * math.cos(tc)]
        )
        if stereo:
            eyes = dict(zip(("left", "right"), eye_positions(head, center_point - head.pos)))
        else:
            eyes = {"mono": head.pos}
        cols = np.nonzero(slit_of_col == i)[0]
        for name, eye in eyes.items():
            frustum = off_axis_frustum(eye, corners, SLIT_NEAR, SLIT_FAR)
            image = render_planar(scene, frustum, config.slit_width, h)
            passes += 1
            if cols.size:
                canvases[name][:, cols] = image.pixels[:, col_in_slit[cols]]
    if stereo:
        result: StereoCanvas | CanvasImage = StereoCanvas(
            CanvasImage(canvases["left"]), CanvasImage(canvases["right"]), screen, head
        )
    else:
        result = CanvasImage(canvases["mono"])
    return result, passes
