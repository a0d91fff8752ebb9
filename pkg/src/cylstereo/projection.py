"""Per-fragment stereo sampling of the cardinal cubemaps onto the canvas.

For each canvas fragment the eye is estimated from the head-to-fragment
direction, the cubemap nearest that eye is chosen, and the fragment is
colored along the ray from that cubemap's center to the fragment's world
point. Anchoring the sampling ray to the screen surface (rather than
reusing the eye ray) is what pins imagery to the physical screen as the
head moves, and makes the pipeline exact wherever a cubemap center
coincides with an eye.

Sampling is nearest-texel by default so end-to-end output is bit
reproducible; bilinear filtering is available behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CullingViolationError, InputDomainError
from .geometry import (
    CARDINAL_ORDER,
    DEFAULT_IPD,
    Cardinal,
    Eye,
    Face,
    FACE_ORDER,
    HeadPose,
    ScreenConfig,
    centered_head,
    face_uv_arrays,
    fragment_world_point,
    row_heights,
    select_cubemap,
    validate_head,
    visible_faces,
    _column_eye_cubemaps,
)
from .images import CanvasImage
from .render import CubemapSet, render_cubemaps
from .scene import Scene

FILTERS = ("nearest", "bilinear")


@dataclass(frozen=True)
class StereoCanvas:
    """A left/right pair rendered for one screen and head pose."""

    left: CanvasImage
    right: CanvasImage
    screen: ScreenConfig
    head: HeadPose

    def __post_init__(self):
        ls, rs = self.left.pixels.shape, self.right.pixels.shape
        expect = (self.screen.canvas_height, self.screen.canvas_width, 3)
        if ls != expect or rs != expect:
            raise InputDomainError(f"canvas shapes {ls}/{rs} do not match screen {expect}")

    def eye(self, eye: Eye) -> CanvasImage:
        if eye is Eye.LEFT:
            return self.left
        if eye is Eye.RIGHT:
            return self.right
        raise InputDomainError("stereo canvas has no center eye")


@dataclass(frozen=True)
class SampleTrace:
    """Everything the sampler decided for one fragment, for inspection UIs."""

    pixel: tuple[int, int]
    eye: Eye
    cubemap: Cardinal
    face: Face
    u: float
    v: float
    texel: tuple[int, int]
    color: tuple[int, int, int]


def sample_fragment(
    cubemaps: CubemapSet,
    head: HeadPose,
    screen: ScreenConfig,
    pixel: tuple[int, int],
    eye: Eye,
) -> SampleTrace:
    """Sample one canvas fragment for one eye (nearest texel).

    Raises CullingViolationError if the required face was not rendered,
    which indicates a culler bug rather than a user error.
    """
    if eye not in (Eye.LEFT, Eye.RIGHT):
        raise InputDomainError("sample_fragment needs a left or right eye")
    x, y = pixel
    fragment = fragment_world_point(x, y, screen)
    hx, hy, hz = head.position
    vx, vz = fragment[0] - hx, fragment[2] - hz
    norm = math.hypot(vx, vz)
    dx, dz = vx / norm, vz / norm
    sign = 1.0 if eye is Eye.RIGHT else -1.0
    offset = sign * (head.ipd / 2) * np.array([dz, 0.0, -dx])
    cubemap = select_cubemap(offset)
    center = cubemaps.centers[cubemap]
    face, u, v = _face_uv(fragment - center)
    res = cubemaps.resolution
    i = min(int(u * res), res - 1)
    j = min(int(v * res), res - 1)
    image = cubemaps.faces.get((cubemap, face))
    if image is None:
        raise CullingViolationError(
            f"fragment {pixel} ({eye.value} eye) needs {cubemap}.{face}, "
            "which the culler did not schedule"
        )
    color = image.color[j, i]
    return SampleTrace(
        pixel=(x, y), eye=eye, cubemap=cubemap, face=face,
        u=u, v=v, texel=(i, j), color=(int(color[0]), int(color[1]), int(color[2])),
    )


def _face_uv(direction: np.ndarray) -> tuple[Face, float, float]:
    face, u, v = face_uv_arrays(direction[None, :])
    return FACE_ORDER[int(face[0])], float(u[0]), float(v[0])


def _sample_canvas(
    cubemaps: CubemapSet,
    head: HeadPose,
    screen: ScreenConfig,
    eye: Eye,
    filter: str = "nearest",
) -> np.ndarray:
    """Vectorized whole-canvas sampler; same decisions as sample_fragment."""
    if filter not in FILTERS:
        raise InputDomainError(f"filter must be one of {FILTERS}, got {filter!r}")
    w, h = screen.canvas_width, screen.canvas_height
    fx, fz, choices = _column_eye_cubemaps(head, screen)
    idx = choices[eye]
    centers = np.array([cubemaps.centers[c] for c in CARDINAL_ORDER])
    dx = fx - centers[idx, 0]
    dz = fz - centers[idx, 2]
    dy = row_heights(screen)[:, None] - centers[idx, 1][None, :]
    dirs = np.stack(
        [np.broadcast_to(dx, (h, w)), dy, np.broadcast_to(dz, (h, w))], axis=-1
    )
    face, u, v = face_uv_arrays(dirs)
    cube = np.broadcast_to(idx, (h, w))

    res = cubemaps.resolution
    out = np.zeros((h, w, 3), dtype=np.uint8 if filter == "nearest" else np.float64)
    codes = cube.astype(np.int64) * 6 + face
    for code in np.unique(codes).tolist():
        ci, fi = divmod(code, 6)
        key = (CARDINAL_ORDER[ci], FACE_ORDER[fi])
        image = cubemaps.faces.get(key)
        if image is None:
            raise CullingViolationError(
                f"sampler needs {key[0]}.{key[1]}, which the culler did not schedule"
            )
        mask = codes == code
        um, vm = u[mask], v[mask]
        if filter == "nearest":
            ii = np.minimum((um * res).astype(np.int64), res - 1)
            jj = np.minimum((vm * res).astype(np.int64), res - 1)
            out[mask] = image.color[jj, ii]
        else:
            # bilinear within the face, clamped at its edges
            uu = np.clip(um * res - 0.5, 0.0, res - 1.0)
            vv = np.clip(vm * res - 0.5, 0.0, res - 1.0)
            i0 = np.minimum(uu.astype(np.int64), res - 2)
            j0 = np.minimum(vv.astype(np.int64), res - 2)
            fu = (uu - i0)[:, None]
            fv = (vv - j0)[:, None]
            c = image.color.astype(np.float64)
            out[mask] = (
                c[j0, i0] * (1 - fu) * (1 - fv)
                + c[j0, i0 + 1] * fu * (1 - fv)
                + c[j0 + 1, i0] * (1 - fu) * fv
                + c[j0 + 1, i0 + 1] * fu * fv
            )
    if filter == "nearest":
        return out
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def render_scs(
    scene: Scene,
    head: HeadPose,
    screen: ScreenConfig,
    resolution: int = 256,
    filter: str = "nearest",
    full_offset: bool = False,
) -> tuple[StereoCanvas, int]:
    """The full pipeline: cull faces, render cubemaps, sample both eyes.

    Returns the stereo canvas and the render pass count (one pass per
    rendered cubemap face).
    """
    validate_head(head, screen)
    faces = visible_faces(head, screen, full_offset)
    cubemaps = render_cubemaps(scene, head, faces, resolution, full_offset)
    left = CanvasImage(_sample_canvas(cubemaps, head, screen, Eye.LEFT, filter))
    right = CanvasImage(_sample_canvas(cubemaps, head, screen, Eye.RIGHT, filter))
    return StereoCanvas(left, right, screen, head), cubemaps.pass_count


def render_scs_center_mode(
    scene: Scene,
    screen: ScreenConfig,
    resolution: int = 256,
    ipd: float = DEFAULT_IPD,
    filter: str = "nearest",
) -> tuple[StereoCanvas, int]:
    """Multi-user approximation: the pipeline with the head pinned to the center."""
    return render_scs(scene, centered_head(screen, ipd), screen, resolution, filter)


COMPOSE_MODES = ("anaglyph", "sbs", "left", "right")


def compose(stereo: StereoCanvas, mode: str) -> CanvasImage:
    """Flatten a stereo pair for display: red/cyan anaglyph, side-by-side, or one eye."""
    if mode == "left":
        return stereo.left
    if mode == "right":
        return stereo.right
    if mode == "anaglyph":
        out = stereo.right.pixels.copy()
        out[..., 0] = stereo.left.pixels[..., 0]
        return CanvasImage(out)
    if mode == "sbs":
        return CanvasImage(np.concatenate([stereo.left.pixels, stereo.right.pixels], axis=1))
    raise InputDomainError(f"compose mode must be one of {COMPOSE_MODES}, got {mode!r}")
