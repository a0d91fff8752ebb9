"""Analytic scene description: parsing, serialization, ray queries, shading.

Scenes are immutable after parse_scene and safe for concurrent queries.
The document format is JSON with keys ``background``, ``light_dir`` and
``primitives``; see docs/scene-schema.md. Three fixtures ship with the
package (depth-rings, checker-room, marker-sweep).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneParseError

#: Rays ignore hits closer than this, avoiding self-intersection.
HIT_EPS = 1e-6

AMBIENT = 0.1
DIFFUSE = 0.9


@dataclass(frozen=True)
class Checker:
    albedo2: tuple[float, float, float]
    cells: int


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float
    albedo: tuple[float, float, float]


@dataclass(frozen=True)
class Quad:
    """Parallelogram patch: corner + a*edge_u + b*edge_v for a, b in [0, 1]."""

    corner: tuple[float, float, float]
    edge_u: tuple[float, float, float]
    edge_v: tuple[float, float, float]
    albedo: tuple[float, float, float]
    checker: Checker | None = None


@dataclass(frozen=True)
class Marker:
    """Unlit sphere with a unique id color, for exact-color feature probes."""

    center: tuple[float, float, float]
    radius: float
    id_color: tuple[float, float, float]


Primitive = Sphere | Quad | Marker


@dataclass(frozen=True)
class Scene:
    background: tuple[float, float, float]
    light_dir: tuple[float, float, float]
    primitives: tuple[Primitive, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Hit:
    t: float
    point: tuple[float, float, float]
    normal: tuple[float, float, float]
    color: tuple[float, float, float]
    unlit: bool = False


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------


def _want_keys(obj: dict, required: set[str], optional: set[str], path: str) -> None:
    missing = required - obj.keys()
    if missing:
        raise SceneParseError(f"missing field(s) {sorted(missing)}", path)
    unknown = obj.keys() - required - optional
    if unknown:
        raise SceneParseError(f"unknown field(s) {sorted(unknown)}", path)


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneParseError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value):
        raise SceneParseError(f"number must be finite, got {value!r}", path)
    return float(value)


def _vec3(value, path: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise SceneParseError(f"expected a list of 3 numbers, got {value!r}", path)
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _color(value, path: str) -> tuple[float, float, float]:
    rgb = _vec3(value, path)
    for i, v in enumerate(rgb):
        if not (0.0 <= v <= 1.0):
            raise SceneParseError(f"color channel must be in [0, 1], got {v}", f"{path}[{i}]")
    return rgb


def _parse_primitive(obj, path: str) -> Primitive:
    if not isinstance(obj, dict):
        raise SceneParseError(f"expected an object, got {obj!r}", path)
    kind = obj.get("kind")
    if kind == "sphere":
        _want_keys(obj, {"kind", "center", "radius", "albedo"}, set(), path)
        radius = _number(obj["radius"], f"{path}.radius")
        if radius <= 0:
            raise SceneParseError(f"radius must be > 0, got {radius}", f"{path}.radius")
        return Sphere(_vec3(obj["center"], f"{path}.center"), radius, _color(obj["albedo"], f"{path}.albedo"))
    if kind == "quad":
        _want_keys(obj, {"kind", "corner", "edge_u", "edge_v", "albedo"}, {"checker"}, path)
        eu = _vec3(obj["edge_u"], f"{path}.edge_u")
        ev = _vec3(obj["edge_v"], f"{path}.edge_v")
        if np.linalg.norm(np.cross(eu, ev)) <= 1e-12:
            raise SceneParseError("edges must be nonzero and non-parallel", f"{path}.edge_v")
        checker = None
        if "checker" in obj:
            cpath = f"{path}.checker"
            cobj = obj["checker"]
            if not isinstance(cobj, dict):
                raise SceneParseError(f"expected an object, got {cobj!r}", cpath)
            _want_keys(cobj, {"albedo2", "cells"}, set(), cpath)
            cells = cobj["cells"]
            if isinstance(cells, bool) or not isinstance(cells, int) or cells < 1:
                raise SceneParseError(f"cells must be a positive integer, got {cells!r}", f"{cpath}.cells")
            checker = Checker(_color(cobj["albedo2"], f"{cpath}.albedo2"), cells)
        return Quad(
            _vec3(obj["corner"], f"{path}.corner"), eu, ev,
            _color(obj["albedo"], f"{path}.albedo"), checker,
        )
    if kind == "marker":
        _want_keys(obj, {"kind", "center", "radius", "id_color"}, set(), path)
        radius = _number(obj["radius"], f"{path}.radius")
        if radius <= 0:
            raise SceneParseError(f"radius must be > 0, got {radius}", f"{path}.radius")
        return Marker(_vec3(obj["center"], f"{path}.center"), radius, _color(obj["id_color"], f"{path}.id_color"))
    raise SceneParseError(f"unknown primitive kind {kind!r}", f"{path}.kind")


def parse_scene(text: str) -> Scene:
    """Parse and validate a scene document; errors carry the offending field path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneParseError("top level must be an object")
    _want_keys(doc, {"background", "light_dir", "primitives"}, set(), "$")
    background = _color(doc["background"], "$.background")
    light = _vec3(doc["light_dir"], "$.light_dir")
    norm = math.sqrt(sum(v * v for v in light))
    if abs(norm - 1.0) > 1e-6:
        raise SceneParseError(f"light_dir must be unit length, |v| = {norm!r}", "$.light_dir")
    prims_obj = doc["primitives"]
    if not isinstance(prims_obj, list):
        raise SceneParseError("primitives must be a list", "$.primitives")
    prims = tuple(
        _parse_primitive(p, f"$.primitives[{i}]") for i, p in enumerate(prims_obj)
    )
    seen: dict[tuple, int] = {}
    for i, p in enumerate(prims):
        if isinstance(p, Marker):
            if p.id_color in seen:
                raise SceneParseError(
                    f"id_color duplicates primitives[{seen[p.id_color]}]",
                    f"$.primitives[{i}].id_color",
                )
            seen[p.id_color] = i
    return Scene(background, light, prims)


def serialize_scene(scene: Scene) -> str:
    """Scene back to its document form; parse_scene round-trips identically."""
    prims = []
    for p in scene.primitives:
        if isinstance(p, Sphere):
            prims.append({"kind": "sphere", "center": list(p.center), "radius": p.radius,
                          "albedo": list(p.albedo)})
        elif isinstance(p, Quad):
            obj = {"kind": "quad", "corner": list(p.corner), "edge_u": list(p.edge_u),
                   "edge_v": list(p.edge_v), "albedo": list(p.albedo)}
            if p.checker is not None:
                obj["checker"] = {"albedo2": list(p.checker.albedo2), "cells": p.checker.cells}
            prims.append(obj)
        else:
            prims.append({"kind": "marker", "center": list(p.center), "radius": p.radius,
                          "id_color": list(p.id_color)})
    doc = {"background": list(scene.background), "light_dir": list(scene.light_dir),
           "primitives": prims}
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# Bundled fixtures
# ---------------------------------------------------------------------------


def bundled_scene_names() -> list[str]:
    """Names of the scene fixtures shipped with the package, sorted."""
    from importlib import resources

    root = resources.files(__package__) / "scenes"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled_scene(name: str) -> Scene:
    from importlib import resources

    path = resources.files(__package__) / "scenes" / f"{name}.json"
    try:
        text = path.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise SceneParseError(f"no bundled scene named {name!r}") from exc
    return parse_scene(text)


def load_scene(name_or_path: str) -> Scene:
    """Load a bundled fixture by name, or any scene document by path."""
    if name_or_path in bundled_scene_names():
        return load_bundled_scene(name_or_path)
    try:
        with open(name_or_path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise SceneParseError(f"cannot read scene {name_or_path!r}: {exc}") from exc
    return parse_scene(text)


# ---------------------------------------------------------------------------
# Ray queries (scalar reference path)
# ---------------------------------------------------------------------------


def _sphere_t(center, radius, origin, direction) -> float:
    oc = np.asarray(origin, dtype=float) - np.asarray(center, dtype=float)
    b = float(np.dot(direction, oc))
    disc = b * b - (float(np.dot(oc, oc)) - radius * radius)
    if disc < 0:
        return math.inf
    root = math.sqrt(disc)
    t = -b - root
    if t > HIT_EPS:
        return t
    t = -b + root
    return t if t > HIT_EPS else math.inf


def _quad_basis(quad: Quad) -> np.ndarray:
    """Inverse of [edge_u, edge_v, unit normal] as columns; maps offsets to (a, b, s)."""
    eu = np.array(quad.edge_u)
    ev = np.array(quad.edge_v)
    n = np.cross(eu, ev)
    n = n / np.linalg.norm(n)
    return np.linalg.inv(np.stack([eu, ev, n], axis=1))


def _checker_color(quad: Quad, a: float, b: float) -> tuple[float, float, float]:
    if quad.checker is None:
        return quad.albedo
    cells = quad.checker.cells
    ia = min(int(a * cells), cells - 1)
    ib = min(int(b * cells), cells - 1)
    return quad.albedo if (ia + ib) % 2 == 0 else quad.checker.albedo2


def intersect(scene: Scene, origin, direction) -> Hit | None:
    """Nearest hit with t > HIT_EPS, ties broken by primitive order; None on miss."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    best: Hit | None = None
    for prim in scene.primitives:
        if isinstance(prim, (Sphere, Marker)):
            t = _sphere_t(prim.center, prim.radius, origin, direction)
            if t < (best.t if best else math.inf):
                p = origin + t * direction
                n = (p - np.array(prim.center)) / prim.radius
                if isinstance(prim, Marker):
                    best = Hit(t, tuple(p), tuple(n), prim.id_color, unlit=True)
                else:
                    best = Hit(t, tuple(p), tuple(n), prim.albedo)
        else:
            n = np.cross(prim.edge_u, prim.edge_v)
            n = n / np.linalg.norm(n)
            denom = float(np.dot(direction, n))
            if denom == 0.0:
                continue
            t = float(np.dot(np.array(prim.corner) - origin, n)) / denom
            if not (HIT_EPS < t < (best.t if best else math.inf)):
                continue
            p = origin + t * direction
            a, b, _ = _quad_basis(prim) @ (p - np.array(prim.corner))
            if 0.0 <= a <= 1.0 and 0.0 <= b <= 1.0:
                # two-sided: normal faces the incoming ray
                nn = -n if denom > 0 else n
                best = Hit(float(t), tuple(p), tuple(nn), _checker_color(prim, a, b))
    return best


def shade(hit: Hit, scene: Scene) -> np.ndarray:
    """Lambert with a fixed ambient floor; markers pass their id color through."""
    color = np.array(hit.color)
    if hit.unlit:
        return color
    lambert = max(0.0, -float(np.dot(hit.normal, scene.light_dir)))
    return np.clip(color * (DIFFUSE * lambert + AMBIENT), 0.0, 1.0)


# ---------------------------------------------------------------------------
# Ray queries (vectorized production path)
# ---------------------------------------------------------------------------


def trace_rays(scene: Scene, origins: np.ndarray, dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shade a batch of rays: ``(N,3) origins/dirs -> (colors (N,3), t (N,))``.

    Misses return the scene background with t = +inf. ``origins`` may be a
    single point broadcast against many directions. Agrees with the scalar
    intersect/shade pair bit for bit.
    """
    dirs = np.asarray(dirs, dtype=float)
    origins = np.broadcast_to(np.asarray(origins, dtype=float), dirs.shape)
    n = dirs.shape[0]
    best_t = np.full(n, np.inf)
    best_idx = np.full(n, -1, dtype=np.int64)

    for i, prim in enumerate(scene.primitives):
        if isinstance(prim, (Sphere, Marker)):
            oc = origins - np.array(prim.center)
            b = np.einsum("ij,ij->i", dirs, oc)
            disc = b * b - (np.einsum("ij,ij->i", oc, oc) - prim.radius**2)
            valid = disc >= 0
            root = np.sqrt(np.where(valid, disc, 0.0))
            t_near = -b - root
            t_far = -b + root
            t = np.where(t_near > HIT_EPS, t_near, np.where(t_far > HIT_EPS, t_far, np.inf))
            t = np.where(valid, t, np.inf)
        else:
            nrm = np.cross(prim.edge_u, prim.edge_v)
            nrm = nrm / np.linalg.norm(nrm)
            denom = dirs @ nrm
            with np.errstate(divide="ignore", invalid="ignore"):
                t = ((np.array(prim.corner) - origins) @ nrm) / denom
            t = np.where((denom != 0.0) & (t > HIT_EPS), t, np.inf)
            with np.errstate(invalid="ignore"):
                p = origins + t[:, None] * dirs
                ab = (p - np.array(prim.corner)) @ _quad_basis(prim).T
                inside = (ab[:, 0] >= 0) & (ab[:, 0] <= 1) & (ab[:, 1] >= 0) & (ab[:, 1] <= 1)
            t = np.where(np.isfinite(t) & inside, t, np.inf)
        closer = t < best_t
        best_t = np.where(closer, t, best_t)
        best_idx = np.where(closer, i, best_idx)

    colors = np.empty((n, 3))
    colors[:] = np.array(scene.background)
    for i, prim in enumerate(scene.primitives):
        mask = best_idx == i
        if not mask.any():
            continue
        t = best_t[mask]
        p = origins[mask] + t[:, None] * dirs[mask]
        if isinstance(prim, Marker):
            colors[mask] = np.array(prim.id_color)
        elif isinstance(prim, Sphere):
            normals = (p - np.array(prim.center)) / prim.radius
            lambert = np.maximum(0.0, -(normals @ np.array(scene.light_dir)))
            colors[mask] = np.clip(
                np.array(prim.albedo) * (DIFFUSE * lambert + AMBIENT)[:, None], 0.0, 1.0
            )
        else:
            nrm = np.cross(prim.edge_u, prim.edge_v)
            nrm = nrm / np.linalg.norm(nrm)
            facing = dirs[mask] @ nrm
            normals = np.where(facing[:, None] > 0, -nrm, nrm)
            ab = (p - np.array(prim.corner)) @ _quad_basis(prim).T
            cells = prim.checker.cells if prim.checker else 1
            ia = np.minimum((ab[:, 0] * cells).astype(np.int64), cells - 1)
            ib = np.minimum((ab[:, 1] * cells).astype(np.int64), cells - 1)
            albedo = np.where(
                (((ia + ib) % 2) == 0)[:, None],
                np.array(prim.albedo),
                np.array(prim.checker.albedo2 if prim.checker else prim.albedo),
            )
            lambert = np.maximum(0.0, -(normals @ np.array(scene.light_dir)))
            colors[mask] = np.clip(albedo * (DIFFUSE * lambert + AMBIENT)[:, None], 0.0, 1.0)
    return colors, best_t
