"""Screen, head, cubemap and frustum geometry for the cylindrical stereo pipeline.

Coordinate conventions, used by every module in this package:

* Right-handed frame, Y up, origin on the cylinder axis at floor level.
* Azimuth is measured in degrees from +Z ("north"), increasing toward +X
  ("east"); a screen point at azimuth theta and height y is
  ``(r*sin(theta), y, r*cos(theta))``.
* Cardinal cubemap offsets: North=+Z, East=+X, South=-Z, West=-X.
* Cubemap faces are keyed by the dominant component of a direction; the
  per-face (u, v) formulas are listed in docs/cubemap-faces.md and
  implemented here.
* Canvas columns map linearly to azimuth with a pixel-center convention
  (column x covers azimuth ``(x + 0.5 - W/2) * arc/W``); canvas row 0 is
  the bottom of the screen.

Tie-break priorities are fixed so outputs are bit-reproducible: cubemaps
North > East > South > West, faces +X > -X > +Y > -Y > +Z > -Z.

All operations are pure functions of immutable inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateDirectionError,
    DegenerateFrustumError,
    InputDomainError,
)

UP = np.array([0.0, 1.0, 0.0])

#: Average adult interpupillary distance, meters.
DEFAULT_IPD = 0.064

#: Minimum clearance between any cubemap center and the screen wall, meters.
HEAD_MARGIN = 0.01

#: Directions this close (after normalization) to a cubemap face boundary
#: count as touching both faces, so culling stays conservative.
FACE_BOUNDARY_EPS = 1e-6

CAVERN_RADIUS = 3.0
CAVERN_HEIGHT = 2.3
CAVERN_ARC = 270.0


class Cardinal(Enum):
    """One of the four cubemap offset directions."""

    NORTH = "North"
    EAST = "East"
    SOUTH = "South"
    WEST = "West"

    @property
    def axis(self) -> np.ndarray:
        return _CARDINAL_AXES[_CARDINAL_INDEX[self]].copy()

    def __str__(self) -> str:
        return self.value


#: Tie-break priority order for cubemap selection.
CARDINAL_ORDER = (Cardinal.NORTH, Cardinal.EAST, Cardinal.SOUTH, Cardinal.WEST)
_CARDINAL_INDEX = {c: i for i, c in enumerate(CARDINAL_ORDER)}
_CARDINAL_AXES = np.array(
    [
        [0.0, 0.0, 1.0],  # North
        [1.0, 0.0, 0.0],  # East
        [0.0, 0.0, -1.0],  # South
        [-1.0, 0.0, 0.0],  # West
    ]
)


class Face(Enum):
    """Cubemap face, named after its outward axis."""

    PX = "+X"
    NX = "-X"
    PY = "+Y"
    NY = "-Y"
    PZ = "+Z"
    NZ = "-Z"

    @property
    def axis(self) -> np.ndarray:
        return _FACE_AXES[_FACE_INDEX[self]].copy()

    def __str__(self) -> str:
        return self.value


#: Tie-break priority order for face selection.
FACE_ORDER = (Face.PX, Face.NX, Face.PY, Face.NY, Face.PZ, Face.NZ)
_FACE_INDEX = {f: i for i, f in enumerate(FACE_ORDER)}
_FACE_AXES = np.array(
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
)


class Eye(Enum):
    LEFT = "left"
    RIGHT = "right"
    CENTER = "center"


@dataclass(frozen=True)
class ScreenConfig:
    """Physical cylindrical screen plus the canvas raster mapped onto it.

    The canvas covers exactly ``arc`` degrees horizontally and ``height``
    meters vertically, linearly on both axes.
    """

    radius: float
    height: float
    arc: float
    canvas_width: int
    canvas_height: int

    def __post_init__(self):
        if not (self.radius > 0):
            raise InputDomainError(f"radius must be > 0, got {self.radius}")
        if not (self.height > 0):
            raise InputDomainError(f"height must be > 0, got {self.height}")
        if not (0 < self.arc <= 360):
            raise InputDomainError(f"arc must be in (0, 360], got {self.arc}")
        if self.canvas_width < 1 or self.canvas_height < 1:
            raise InputDomainError("canvas dimensions must be >= 1")


def cavern_screen(canvas_width: int = 2700, canvas_height: int = 230) -> ScreenConfig:
    """The 270-degree, 3 m radius, 2.3 m tall reference screen.

    The default canvas is 10 px/degree and 100 px/m; pass smaller
    dimensions for desk-scale tests.
    """
    return ScreenConfig(CAVERN_RADIUS, CAVERN_HEIGHT, CAVERN_ARC, canvas_width, canvas_height)


@dataclass(frozen=True)
class HeadPose:
    """Tracked head position inside the cylinder, with eye separation."""

    position: tuple[float, float, float]
    ipd: float = DEFAULT_IPD

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3 or not all(math.isfinite(v) for v in pos):
            raise InputDomainError(f"position must be 3 finite floats, got {self.position}")
        object.__setattr__(self, "position", pos)
        if not (self.ipd >= 0 and math.isfinite(self.ipd)):
            raise InputDomainError(f"ipd must be finite and >= 0, got {self.ipd}")

    @property
    def pos(self) -> np.ndarray:
        return np.array(self.position)


def validate_head(head: HeadPose, screen: ScreenConfig, margin: float = HEAD_MARGIN) -> None:
    """Check the head sits inside the screen with room for the cubemap offsets.

    Raises InputDomainError if the horizontal distance from the axis exceeds
    ``radius - ipd/2 - margin`` or the height leaves ``[0, screen.height]``.
    """
    x, y, z = head.position
    horiz = math.hypot(x, z)
    limit = screen.radius - head.ipd / 2 - margin
    if horiz > limit:
        raise InputDomainError(
            f"head {head.position} is {horiz:.4f} m from the axis; "
            f"limit is {limit:.4f} m (radius - ipd/2 - {margin} m margin)"
        )
    if not (0 <= y <= screen.height):
        raise InputDomainError(f"head height {y} outside [0, {screen.height}]")


def centered_head(screen: ScreenConfig, ipd: float = DEFAULT_IPD) -> HeadPose:
    """Head on the axis at half screen height (the multi-user approximation)."""
    return HeadPose((0.0, screen.height / 2, 0.0), ipd=ipd)


# ---------------------------------------------------------------------------
# Canvas <-> cylinder mappings
# ---------------------------------------------------------------------------


def canvas_to_azimuth(x: int, screen: ScreenConfig) -> float:
    """Azimuth in degrees of the center of canvas column ``x``."""
    if not (0 <= x < screen.canvas_width):
        raise InputDomainError(f"column {x} outside [0, {screen.canvas_width})")
    return (x + 0.5 - screen.canvas_width / 2) * (screen.arc / screen.canvas_width)


def azimuth_to_column(azimuth: float, screen: ScreenConfig) -> int:
    """Canvas column whose angular bin contains ``azimuth`` (degrees)."""
    half = screen.arc / 2
    if not (-half <= azimuth <= half):
        raise InputDomainError(f"azimuth {azimuth} outside [-{half}, {half}]")
    col = math.floor(azimuth * screen.canvas_width / screen.arc + screen.canvas_width / 2)
    return min(max(col, 0), screen.canvas_width - 1)


def fragment_world_point(x: int, y: int, screen: ScreenConfig) -> np.ndarray:
    """World position of the center of canvas pixel (x, y); row 0 is the floor edge."""
    if not (0 <= y < screen.canvas_height):
        raise InputDomainError(f"row {y} outside [0, {screen.canvas_height})")
    theta = math.radians(canvas_to_azimuth(x, screen))
    fy = (y + 0.5) * screen.height / screen.canvas_height
    return np.array([screen.radius * math.sin(theta), fy, screen.radius * math.cos(theta)])


def column_azimuths(screen: ScreenConfig) -> np.ndarray:
    """Azimuths (radians) of all column centers, ascending."""
    x = np.arange(screen.canvas_width)
    return np.radians((x + 0.5 - screen.canvas_width / 2) * (screen.arc / screen.canvas_width))


def row_heights(screen: ScreenConfig) -> np.ndarray:
    """World heights of all row centers, ascending from the floor."""
    y = np.arange(screen.canvas_height)
    return (y + 0.5) * screen.height / screen.canvas_height


# ---------------------------------------------------------------------------
# Eyes and cubemap centers
# ---------------------------------------------------------------------------


def eye_positions(head: HeadPose, view_dir) -> tuple[np.ndarray, np.ndarray]:
    """(left, right) eye positions for a head looking along ``view_dir``.

    The view direction is projected to the horizontal plane, so both eyes
    stay at head height; a purely vertical direction is degenerate.
    """
    v = np.asarray(view_dir, dtype=float)
    hx, hz = v[0], v[2]
    norm = math.hypot(hx, hz)
    if norm < 1e-12:
        raise DegenerateDirectionError(f"view direction {view_dir} has no horizontal component")
    dx, dz = hx / norm, hz / norm
    # right = cross(up, horizontal view dir)
    right = np.array([dz, 0.0, -dx])
    half = head.ipd / 2
    pos = head.pos
    return pos - half * right, pos + half * right


def cubemap_centers(head: HeadPose, full_offset: bool = False) -> dict[Cardinal, np.ndarray]:
    """World centers of the four cardinal cubemaps.

    By default each center is offset by ipd/2 along its cardinal axis, so an
    opposing pair spans exactly one IPD; ``full_offset=True`` uses a whole
    IPD per center for comparison runs.
    """
    d = head.ipd if full_offset else head.ipd / 2
    pos = head.pos
    return {c: pos + d * _CARDINAL_AXES[i] for i, c in enumerate(CARDINAL_ORDER)}


def select_cubemap(eye_offset) -> Cardinal:
    """Cubemap whose axis best matches the head-to-eye offset.

    Ties (including a zero offset) resolve by the fixed priority
    North > East > South > West.
    """
    off = np.asarray(eye_offset, dtype=float)
    dots = _CARDINAL_AXES @ off
    return CARDINAL_ORDER[int(np.argmax(dots))]


# ---------------------------------------------------------------------------
# Cubemap face addressing
# ---------------------------------------------------------------------------

# Per-face (sc, tc) numerators as index/sign pairs: u = (sc/|major| + 1)/2,
# v = (tc/|major| + 1)/2. Same layout as docs/cubemap-faces.md.
_FACE_MAJOR_AXIS = np.array([0, 0, 1, 1, 2, 2])
_FACE_SC_AXIS = np.array([2, 2, 0, 0, 0, 0])
_FACE_SC_SIGN = np.array([-1.0, 1.0, 1.0, 1.0, 1.0, -1.0])
_FACE_TC_AXIS = np.array([1, 1, 2, 2, 1, 1])
_FACE_TC_SIGN = np.array([-1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def face_uv_arrays(dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized face classification: ``dirs[..., 3] -> (face index, u, v)``.

    Face indices follow FACE_ORDER. Ties on the dominant axis resolve by
    that priority; zero vectors are the caller's responsibility.
    """
    d = np.asarray(dirs, dtype=float)
    mags = np.abs(d)
    ax, ay, az = mags[..., 0], mags[..., 1], mags[..., 2]
    axis = np.where((ax >= ay) & (ax >= az), 0, np.where(ay >= az, 1, 2))
    comp = np.take_along_axis(d, axis[..., None], axis=-1)[..., 0]
    face = axis * 2 + (comp < 0)
    major = np.abs(comp)
    sc = _FACE_SC_SIGN[face] * np.take_along_axis(d, _FACE_SC_AXIS[face][..., None], axis=-1)[..., 0]
    tc = _FACE_TC_SIGN[face] * np.take_along_axis(d, _FACE_TC_AXIS[face][..., None], axis=-1)[..., 0]
    u = (sc / major + 1.0) / 2.0
    v = (tc / major + 1.0) / 2.0
    return face, u, v


def face_for_direction(direction) -> tuple[Face, float, float]:
    """Face and in-face (u, v) of a nonzero direction."""
    d = np.asarray(direction, dtype=float)
    if not np.all(np.isfinite(d)) or np.all(d == 0):
        raise InputDomainError(f"direction must be nonzero and finite, got {direction}")
    face, u, v = face_uv_arrays(d[None, :])
    return FACE_ORDER[int(face[0])], float(u[0]), float(v[0])


def direction_for_face_uv(face: Face, u: float, v: float) -> np.ndarray:
    """Unit direction through (u, v) on ``face``; inverse of face_for_direction."""
    sc = 2.0 * u - 1.0
    tc = 2.0 * v - 1.0
    i = _FACE_INDEX[face]
    d = np.zeros(3)
    d[_FACE_MAJOR_AXIS[i]] = 1.0 if i % 2 == 0 else -1.0
    d[_FACE_SC_AXIS[i]] += _FACE_SC_SIGN[i] * sc
    d[_FACE_TC_AXIS[i]] += _FACE_TC_SIGN[i] * tc
    return d / np.linalg.norm(d)


def _candidate_face_pairs(cube_idx: np.ndarray, dirs: np.ndarray, eps: float) -> set[tuple[int, int]]:
    """(cubemap index, face index) pairs touched by ``dirs``, dilated by eps.

    A direction within ``eps`` (after normalization) of a face boundary
    contributes every face it borders.
    """
    d = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
    mags = np.abs(d)
    m1 = mags.max(axis=-1)
    pairs: set[tuple[int, int]] = set()
    for axis in range(3):
        mask = (m1 - mags[..., axis]) <= eps
        if not mask.any():
            continue
        face = axis * 2 + (d[..., axis][mask] < 0)
        pairs.update(zip(cube_idx[mask].tolist(), face.tolist()))
    return pairs


def _column_eye_cubemaps(
    head: HeadPose, screen: ScreenConfig
) -> tuple[np.ndarray, np.ndarray, dict[Eye, np.ndarray]]:
    """Per-column fragment xz, plus each eye's chosen cubemap index per column.

    Returns ``(fx, fz, {eye: cube_idx})``. The horizontal direction from the
    head to a column is row-independent, so the eye estimate and therefore
    the chosen cubemap are fixed per (column, eye).
    """
    az = column_azimuths(screen)
    fx = screen.radius * np.sin(az)
    fz = screen.radius * np.cos(az)
    hx, hy, hz = head.position
    vx, vz = fx - hx, fz - hz
    norm = np.hypot(vx, vz)
    dx, dz = vx / norm, vz / norm
    # right = cross(up, view dir) for a horizontal view dir
    rx, rz = dz, -dx
    half = head.ipd / 2
    choices = {}
    for eye, sign in ((Eye.LEFT, -1.0), (Eye.RIGHT, 1.0)):
        offx, offz = sign * half * rx, sign * half * rz
        # dots with N, E, S, W axes, in tie-break order; argmax takes the first max
        dots = np.stack([offz, offx, -offz, -offx], axis=1)
        choices[eye] = np.argmax(dots, axis=1)
    return fx, fz, choices


def visible_faces(
    head: HeadPose, screen: ScreenConfig, full_offset: bool = False
) -> set[tuple[Cardinal, Face]]:
    """Exact set of (cubemap, face) pairs the canvas sampler will touch.

    Per column and eye, the horizontal sampling direction is fixed and the
    vertical component is monotone in the row, so probing the bottom row,
    top row, and the row nearest the cubemap-center height yields the same
    set as enumerating every row (see visible_faces_bruteforce).
    """
    validate_head(head, screen)
    fx, fz, choices = _column_eye_cubemaps(head, screen)
    centers = cubemap_centers(head, full_offset)
    center_xy = np.array([centers[c] for c in CARDINAL_ORDER])
    hy = head.position[1]
    h, rows = screen.height, screen.canvas_height
    mid_row = min(max(round(hy * rows / h - 0.5), 0), rows - 1)
    probe_rows = sorted({0, mid_row, rows - 1})
    heights = (np.array(probe_rows) + 0.5) * h / rows

    pairs: set[tuple[int, int]] = set()
    for eye in (Eye.LEFT, Eye.RIGHT):
        idx = choices[eye]
        cx = center_xy[idx, 0]
        cy = center_xy[idx, 1]
        cz = center_xy[idx, 2]
        dx, dz = fx - cx, fz - cz
        for k in range(len(probe_rows)):
            dy = heights[k] - cy
            dirs = np.stack([dx, dy, dz], axis=1)
            pairs |= _candidate_face_pairs(idx, dirs, FACE_BOUNDARY_EPS)
    return {(CARDINAL_ORDER[c], FACE_ORDER[f]) for c, f in pairs}


def visible_faces_bruteforce(
    head: HeadPose, screen: ScreenConfig, full_offset: bool = False
) -> set[tuple[Cardinal, Face]]:
    """Reference culler: enumerate every canvas pixel for both eyes.

    Slower than visible_faces but definitionally the sampled-face union;
    tests assert the two agree on every pose.
    """
    validate_head(head, screen)
    fx, fz, choices = _column_eye_cubemaps(head, screen)
    centers = cubemap_centers(head, full_offset)
    center_xy = np.array([centers[c] for c in CARDINAL_ORDER])
    heights = row_heights(screen)

    pairs: set[tuple[int, int]] = set()
    for eye in (Eye.LEFT, Eye.RIGHT):
        idx = choices[eye]
        cx = center_xy[idx, 0]
        cy = center_xy[idx, 1]
        cz = center_xy[idx, 2]
        dx = (fx - cx)[None, :].repeat(len(heights), axis=0)
        dz = (fz - cz)[None, :].repeat(len(heights), axis=0)
        dy = (heights[:, None] - cy[None, :])
        dirs = np.stack([dx, dy, dz], axis=2)
        cube = idx[None, :].repeat(len(heights), axis=0)
        pairs |= _candidate_face_pairs(cube, dirs, FACE_BOUNDARY_EPS)
    return {(CARDINAL_ORDER[c], FACE_ORDER[f]) for c, f in pairs}


def sort_face_set(faces) -> list[tuple[Cardinal, Face]]:
    """Face set in the deterministic presentation order (cubemap, then face priority)."""
    return sorted(faces, key=lambda p: (_CARDINAL_INDEX[p[0]], _FACE_INDEX[p[1]]))


# ---------------------------------------------------------------------------
# Off-axis frustum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Frustum:
    """Generalized perspective frustum anchored to a world-space rectangle.

    ``basis`` rows are (right, up, forward); forward points from the eye
    through the rectangle. Near-plane extents are measured in the basis.
    """

    eye: tuple[float, float, float]
    left: float
    right: float
    bottom: float
    top: float
    near: float
    far: float
    basis: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not (self.near > 0 and self.far > self.near):
            raise InputDomainError(f"need 0 < near < far, got near={self.near} far={self.far}")
        b = np.asarray(self.basis)
        if b.shape != (3, 3) or not np.allclose(b @ b.T, np.eye(3), atol=1e-9):
            raise InputDomainError("basis must be three orthonormal vectors")

    @property
    def eye_pos(self) -> np.ndarray:
        return np.array(self.eye)

    @property
    def basis_matrix(self) -> np.ndarray:
        return np.array(self.basis)


def off_axis_frustum(eye, rect_corners, near: float, far: float) -> Frustum:
    """Frustum that maps a world rectangle exactly onto the full image.

    ``rect_corners`` are (bottom-left, bottom-right, top-right, top-left) as
    seen from the eye. The eye must sit strictly on the viewing side of the
    rectangle's plane.
    """
    if not (near > 0 and far > near):
        raise InputDomainError(f"need 0 < near < far, got near={near} far={far}")
    eye = np.asarray(eye, dtype=float)
    c = np.asarray(rect_corners, dtype=float)
    if c.shape != (4, 3):
        raise InputDomainError(f"expected four 3d corners, got shape {c.shape}")
    ll, lr, ur, ul = c
    scale = max(np.linalg.norm(lr - ll), np.linalg.norm(ul - ll))
    if scale < 1e-12:
        raise InputDomainError("rectangle corners are coincident")
    vr = lr - ll
    vu = ul - ll
    vr = vr / np.linalg.norm(vr)
    vu = vu / np.linalg.norm(vu)
    if abs(np.dot(vr, vu)) > 1e-9:
        raise InputDomainError("corners do not form a rectangle (edges not perpendicular)")
    if np.linalg.norm(ur - (lr + ul - ll)) > 1e-9 * scale:
        raise InputDomainError("corners are not coplanar to 1e-9 (bad fourth corner)")
    vn = np.cross(vr, vu)
    vn = vn / np.linalg.norm(vn)

    d = float(np.dot(ll - eye, vn))
    if d <= 1e-12:
        raise DegenerateFrustumError(
            f"eye {tuple(eye)} is not strictly on the viewing side of the rectangle"
        )
    k = near / d
    return Frustum(
        eye=tuple(eye),
        left=float(np.dot(vr, ll - eye)) * k,
        right=float(np.dot(vr, lr - eye)) * k,
        bottom=float(np.dot(vu, ll - eye)) * k,
        top=float(np.dot(vu, ul - eye)) * k,
        near=float(near),
        far=float(far),
        basis=tuple(map(tuple, (vr, vu, vn))),
    )


def project_to_ndc(frustum: Frustum, point) -> tuple[float, float]:
    """Normalized device coordinates of a world point; rectangle corners map to +-1."""
    q = np.asarray(point, dtype=float) - frustum.eye_pos
    cx, cy, cz = frustum.basis_matrix @ q
    if cz <= 0:
        raise InputDomainError("point is behind the eye")
    xs = cx * frustum.near / cz
    ys = cy * frustum.near / cz
    ndc_x = (2 * xs - (frustum.left + frustum.right)) / (frustum.right - frustum.left)
    ndc_y = (2 * ys - (frustum.bottom + frustum.top)) / (frustum.top - frustum.bottom)
    return ndc_x, ndc_y
