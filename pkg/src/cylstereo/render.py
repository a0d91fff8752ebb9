"""Raytracing back-ends: cubemap faces, planar off-axis views, and the oracle.

All three are one primary ray per texel/pixel (the oracle optionally
supersamples) and deterministic: identical inputs give bit-identical
output, independent of the worker-thread count. A render pass is one
cubemap face or one planar image; the oracle counts one pass per eye.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputDomainError
from .geometry import (
    Cardinal,
    Eye,
    Face,
    Frustum,
    HeadPose,
    ScreenConfig,
    cubemap_centers,
    validate_head,
    _FACE_INDEX,
    _FACE_MAJOR_AXIS,
    _FACE_SC_AXIS,
    _FACE_SC_SIGN,
    _FACE_TC_AXIS,
    _FACE_TC_SIGN,
)
from .images import CanvasImage, quantize_rgb8
from .scene import Scene, trace_rays

#: Environment variable capping render worker threads (default 1).
WORKERS_ENV = "CYLSTEREO_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _render_row_blocks(height: int, row_fn) -> list[np.ndarray]:
    """Evaluate ``row_fn(j0, j1)`` over row blocks, optionally in threads.

    Blocks are reassembled by index, so the output never depends on the
    schedule; each block must only read shared immutable state.
    """
    workers = worker_count()
    if workers == 1:
        return [row_fn(0, height)]
    block = max(1, -(-height // workers))
    spans = [(j0, min(j0 + block, height)) for j0 in range(0, height, block)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: row_fn(*s), spans))


@dataclass(frozen=True)
class FaceImage:
    """One rendered cubemap face: square RGB8 color plus a depth channel.

    ``color[j, i]`` indexes (v, u) texels; depth is the distance from the
    cubemap center along the texel ray, +inf where the ray missed.
    """

    face: Face
    resolution: int
    color: np.ndarray
    depth: np.ndarray

    def __post_init__(self):
        if self.resolution < 2:
            raise InputDomainError(f"face resolution must be >= 2, got {self.resolution}")
        if self.color.shape != (self.resolution, self.resolution, 3):
            raise InputDomainError("color grid does not match resolution")
        if self.depth.shape != (self.resolution, self.resolution):
            raise InputDomainError("depth grid does not match resolution")


@dataclass(frozen=True)
class CubemapSet:
    """The four cardinal cubemaps; only requested faces are present."""

    centers: dict[Cardinal, np.ndarray]
    resolution: int
    faces: dict[tuple[Cardinal, Face], FaceImage] = field(default_factory=dict)

    @property
    def pass_count(self) -> int:
        return len(self.faces)


def _face_texel_dirs(face: Face, resolution: int) -> np.ndarray:
    """Unit directions of all texel centers, shape (res, res, 3) indexed [j, i]."""
    i = _FACE_INDEX[face]
    steps = (np.arange(resolution) + 0.5) / resolution
    sc = 2.0 * steps - 1.0
    d = np.zeros((resolution, resolution, 3))
    d[..., _FACE_MAJOR_AXIS[i]] = 1.0 if i % 2 == 0 else -1.0
    d[..., _FACE_SC_AXIS[i]] += _FACE_SC_SIGN[i] * sc[None, :]
    d[..., _FACE_TC_AXIS[i]] += _FACE_TC_SIGN[i] * sc[:, None]
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def render_face(scene: Scene, center, face: Face, resolution: int) -> FaceImage:
    """Raytrace one cubemap face from ``center``; exactly one render pass."""
    if resolution < 2:
        raise InputDomainError(f"face resolution must be >= 2, got {resolution}")
    dirs = _face_texel_dirs(face, resolution).reshape(-1, 3)
    colors, t = trace_rays(scene, np.asarray(center, dtype=float), dirs)
    return FaceImage(
        face=face,
        resolution=resolution,
        color=quantize_rgb8(colors.reshape(resolution, resolution, 3)),
        depth=t.reshape(resolution, resolution),
    )


def render_cubemaps(
    scene: Scene,
    head: HeadPose,
    faces: set[tuple[Cardinal, Face]],
    resolution: int,
    full_offset: bool = False,
) -> CubemapSet:
    """Render the requested faces; pass count equals the number of faces."""
    if not faces:
        raise InputDomainError("face set must be nonempty")
    centers = cubemap_centers(head, full_offset)
    rendered = {
        (card, face): render_face(scene, centers[card], face, resolution)
        for card, face in sorted(faces, key=lambda p: (p[0].value, p[1].value))
    }
    return CubemapSet(centers=centers, resolution=resolution, faces=rendered)


def render_planar(scene: Scene, frustum: Frustum, width: int, height: int) -> CanvasImage:
    """Perspective raytrace through an off-axis frustum; one render pass.

    Pixel (0, 0) is the bottom-left of the frustum rectangle, matching the
    canvas row convention.
    """
    if width < 1 or height < 1:
        raise InputDomainError(f"image dimensions must be >= 1, got {width}x{height}")
    vr, vu, vn = frustum.basis_matrix
    eye = frustum.eye_pos
    xs = frustum.left + (np.arange(width) + 0.5) / width * (frustum.right - frustum.left)

    def rows(j0: int, j1: int) -> np.ndarray:
        ys = frustum.bottom + (np.arange(j0, j1) + 0.5) / height * (frustum.top - frustum.bottom)
        dirs = (
            xs[None, :, None] * vr
            + ys[:, None, None] * vu
            + frustum.near * vn
        )
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        colors, _ = trace_rays(scene, eye, dirs.reshape(-1, 3))
        return colors.reshape(j1 - j0, width, 3)

    colors = np.concatenate(_render_row_blocks(height, rows), axis=0)
    return CanvasImage(quantize_rgb8(colors))


def render_oracle(
    scene: Scene,
    head: HeadPose,
    screen: ScreenConfig,
    eye: Eye,
    supersample: int = 1,
) -> CanvasImage:
    """Ground-truth canvas: trace from the per-fragment eye through each fragment.

    For every fragment the eye is re-estimated from the head-to-fragment
    direction, exactly as the cubemap sampler estimates it; this is the
    image that pipeline approximates. ``supersample=2`` averages a 2x2
    subpixel grid (4 rays per pixel) before quantization.
    """
    validate_head(head, screen)
    if supersample < 1:
        raise InputDomainError(f"supersample must be >= 1, got {supersample}")
    w, h = screen.canvas_width, screen.canvas_height
    hx, hy, hz = head.position
    half = head.ipd / 2
    s = supersample

    # subpixel column grid: continuous pixel coordinate (x + (k + 0.5)/s) for k < s
    xs = (np.arange(w * s) + 0.5) / s
    az = np.radians((xs - w / 2) * (screen.arc / w))
    fx = screen.radius * np.sin(az)
    fz = screen.radius * np.cos(az)
    vx, vz = fx - hx, fz - hz
    norm = np.hypot(vx, vz)
    rx, rz = vz / norm, -(vx / norm)  # right = cross(up, horizontal view dir)
    if eye is Eye.CENTER:
        ex, ez = np.full_like(fx, hx), np.full_like(fz, hz)
    else:
        sign = 1.0 if eye is Eye.RIGHT else -1.0
        ex, ez = hx + sign * half * rx, hz + sign * half * rz

    def rows(j0: int, j1: int) -> np.ndarray:
        ys = ((np.arange(j0 * s, j1 * s) + 0.5) / s) * screen.height / h
        dirs = np.stack(
            [
                np.broadcast_to(fx - ex, (len(ys), w * s)),
                np.broadcast_to(ys[:, None] - hy, (len(ys), w * s)),
                np.broadcast_to(fz - ez, (len(ys), w * s)),
            ],
            axis=-1,
        )
        dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
        origins = np.stack(
            [
                np.broadcast_to(ex, (len(ys), w * s)),
                np.full((len(ys), w * s), hy),
                np.broadcast_to(ez, (len(ys), w * s)),
            ],
            axis=-1,
        )
        colors, _ = trace_rays(scene, origins.reshape(-1, 3), dirs.reshape(-1, 3))
        colors = colors.reshape(j1 - j0, s, w, s, 3)
        return colors.mean(axis=(1, 3))

    colors = np.concatenate(_render_row_blocks(h, rows), axis=0)
    return CanvasImage(quantize_rgb8(colors))
