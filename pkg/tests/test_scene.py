import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylstereo import (
    Marker,
    Quad,
    Scene,
    SceneParseError,
    Sphere,
    bundled_scene_names,
    intersect,
    load_scene,
    parse_scene,
    serialize_scene,
    shade,
)
from cylstereo.scene import trace_rays

MINIMAL = {"background": [0.1, 0.2, 0.3], "light_dir": [0.0, -1.0, 0.0], "primitives": []}


def doc(**overrides) -> str:
    merged = {**MINIMAL, **overrides}
    return json.dumps(merged)


def test_parse_empty_scene():
    scene = parse_scene(doc())
    assert scene.background == (0.1, 0.2, 0.3)
    assert scene.primitives == ()


def test_bundled_fixtures_parse():
    assert bundled_scene_names() == ["checker-room", "depth-rings", "marker-sweep"]
    rings = load_scene("depth-rings")
    assert len(rings.primitives) >= 3
    sphere_dists = sorted(
        {round(math.hypot(p.center[0], p.center[2]), 3)
         for p in rings.primitives if isinstance(p, Sphere)}
    )
    assert sphere_dists == [1.5, 6.0, 30.0]
    assert len(load_scene("checker-room").primitives) >= 3
    markers = load_scene("marker-sweep").primitives
    assert all(isinstance(p, Marker) for p in markers)


def test_negative_radius_names_field():
    bad = doc(primitives=[{"kind": "sphere", "center": [0, 0, 0], "radius": -1, "albedo": [1, 1, 1]}])
    with pytest.raises(SceneParseError, match=r"primitives\[0\]\.radius"):
        parse_scene(bad)


def test_unknown_primitive_kind():
    bad = doc(primitives=[{"kind": "torus"}])
    with pytest.raises(SceneParseError, match="unknown primitive kind"):
        parse_scene(bad)


def test_unknown_field_rejected():
    bad = doc(primitives=[{"kind": "sphere", "center": [0, 0, 0], "radius": 1,
                           "albedo": [1, 1, 1], "glow": True}])
    with pytest.raises(SceneParseError, match="glow"):
        parse_scene(bad)
    with pytest.raises(SceneParseError, match="extra"):
        parse_scene(json.dumps({**MINIMAL, "extra": 1}))


def test_non_finite_number():
    bad = doc(primitives=[{"kind": "sphere", "center": [0, 0, None], "radius": 1, "albedo": [1, 1, 1]}])
    with pytest.raises(SceneParseError, match=r"center\[2\]"):
        parse_scene(bad)
    with pytest.raises(SceneParseError, match="finite"):
        parse_scene(doc(background=[0.1, 0.2, float("nan")]).replace("NaN", "1e999"))


def test_non_unit_light():
    with pytest.raises(SceneParseError, match="light_dir"):
        parse_scene(doc(light_dir=[0, -2, 0]))


def test_color_out_of_range():
    with pytest.raises(SceneParseError, match="background"):
        parse_scene(doc(background=[0.1, 1.2, 0.3]))


def test_duplicate_marker_colors():
    marker = {"kind": "marker", "center": [0, 0, 5], "radius": 0.1, "id_color": [1, 0, 0]}
    other = {**marker, "center": [1, 0, 5]}
    with pytest.raises(SceneParseError, match=r"primitives\[1\]\.id_color"):
        parse_scene(doc(primitives=[marker, other]))


def test_parallel_quad_edges():
    bad = doc(primitives=[{"kind": "quad", "corner": [0, 0, 0], "edge_u": [1, 0, 0],
                           "edge_v": [2, 0, 0], "albedo": [1, 1, 1]}])
    with pytest.raises(SceneParseError, match="non-parallel"):
        parse_scene(bad)


def test_malformed_document():
    with pytest.raises(SceneParseError, match="malformed"):
        parse_scene("{not json")


def test_missing_scene_file():
    with pytest.raises(SceneParseError, match="no-such-scene"):
        load_scene("no-such-scene")


@pytest.mark.parametrize("name", ["depth-rings", "checker-room", "marker-sweep"])
def test_serialize_round_trip(name):
    scene = load_scene(name)
    assert parse_scene(serialize_scene(scene)) == scene


# ---------------------------------------------------------------------------
# intersection
# ---------------------------------------------------------------------------


def sphere_scene(*spheres) -> Scene:
    return Scene((0, 0, 0), (0.0, -1.0, 0.0), tuple(spheres))


def test_intersect_unit_sphere_ahead():
    scene = sphere_scene(Sphere((0, 0, 5), 1.0, (1, 1, 1)))
    hit = intersect(scene, (0, 0, 0), (0, 0, 1))
    assert hit is not None
    assert hit.t == pytest.approx(4.0, abs=1e-12)
    assert hit.normal == pytest.approx((0, 0, -1))


def test_intersect_miss():
    scene = sphere_scene(Sphere((0, 0, 5), 1.0, (1, 1, 1)))
    assert intersect(scene, (0, 0, 0), (0, 1, 0)) is None


def test_intersect_concentric_nearer_wins():
    outer = Sphere((0, 0, 5), 2.0, (1, 0, 0))
    inner = Sphere((0, 0, 5), 1.0, (0, 1, 0))
    hit = intersect(sphere_scene(outer, inner), (0, 0, 0), (0, 0, 1))
    assert hit.t == pytest.approx(3.0)
    assert hit.color == (1, 0, 0)  # outer surface is nearer than inner
    # from inside both, the far surface of the inner sphere comes first
    hit_inside = intersect(sphere_scene(outer, inner), (0, 0, 5), (0, 0, 1))
    assert hit_inside.t == pytest.approx(1.0)
    assert hit_inside.color == (0, 1, 0)


def test_intersect_order_tie_break():
    a = Sphere((0, 0, 5), 1.0, (1, 0, 0))
    b = Sphere((0, 0, 5), 1.0, (0, 1, 0))
    hit = intersect(sphere_scene(a, b), (0, 0, 0), (0, 0, 1))
    assert hit.color == (1, 0, 0)


def test_intersect_quad_and_checker():
    quad = Quad((-1, -1, 3), (2, 0, 0), (0, 2, 0), (1, 1, 1), None)
    scene = Scene((0, 0, 0), (0.0, 0.0, 1.0), (quad,))
    hit = intersect(scene, (0, 0, 0), (0, 0, 1))
    assert hit.t == pytest.approx(3.0)
    assert hit.normal == pytest.approx((0, 0, -1))  # flipped toward the ray
    assert intersect(scene, (0, 2.1, 0), (0, 0, 1)) is None


def test_intersect_marker_unlit():
    marker = Marker((0, 0, 5), 0.5, (1.0, 0.0, 120 / 255))
    scene = Scene((0, 0, 0), (0.0, -1.0, 0.0), (marker,))
    hit = intersect(scene, (0, 0, 0), (0, 0, 1))
    assert hit.unlit
    assert shade(hit, scene) == pytest.approx(hit.color)


@given(
    tx=st.floats(-50, 50), ty=st.floats(-50, 50), tz=st.floats(-50, 50),
)
@settings(max_examples=40)
def test_intersect_translation_equivariant(tx, ty, tz):
    offset = np.array([tx, ty, tz])
    sphere = Sphere((0.3, -0.2, 6), 1.2, (1, 1, 1))
    moved = Sphere(tuple(np.array(sphere.center) + offset), 1.2, (1, 1, 1))
    direction = np.array([0.05, -0.02, 1.0])
    direction /= np.linalg.norm(direction)
    base = intersect(sphere_scene(sphere), (0, 0, 0), direction)
    shifted = intersect(sphere_scene(moved), offset, direction)
    assert base is not None and shifted is not None
    assert shifted.t == pytest.approx(base.t, rel=1e-9)


# ---------------------------------------------------------------------------
# shading
# ---------------------------------------------------------------------------


def lit_hit(normal) -> tuple:
    scene = Scene((0, 0, 0), (0.0, 0.0, -1.0), ())
    from cylstereo.scene import Hit

    return Hit(1.0, (0, 0, 1), normal, (0.6, 0.4, 0.2)), scene


def test_shade_facing_light():
    hit, scene = lit_hit((0.0, 0.0, 1.0))
    assert shade(hit, scene) == pytest.approx((0.6, 0.4, 0.2))


def test_shade_perpendicular():
    hit, scene = lit_hit((1.0, 0.0, 0.0))
    assert shade(hit, scene) == pytest.approx((0.06, 0.04, 0.02))


def test_shade_45_degrees():
    n = 1 / math.sqrt(2)
    hit, scene = lit_hit((n, 0.0, n))
    factor = 0.9 / math.sqrt(2) + 0.1
    assert shade(hit, scene) == pytest.approx(
        (0.6 * factor, 0.4 * factor, 0.2 * factor)
    )


def test_shade_clamped_to_unit_range():
    hit, scene = lit_hit((0.0, 0.0, 1.0))
    out = shade(hit, scene)
    assert np.all(out >= 0) and np.all(out <= 1)


# ---------------------------------------------------------------------------
# batch tracer agrees with the scalar reference
# ---------------------------------------------------------------------------


def test_trace_rays_matches_scalar(depth_rings):
    rng = np.random.default_rng(3)
    origins = rng.uniform(-1, 1, size=(200, 3)) + np.array([0, 1.2, 0])
    dirs = rng.normal(size=(200, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    colors, t = trace_rays(depth_rings, origins, dirs)
    for k in range(200):
        hit = intersect(depth_rings, origins[k], dirs[k])
        if hit is None:
            assert math.isinf(t[k])
            assert colors[k] == pytest.approx(depth_rings.background)
        else:
            assert t[k] == pytest.approx(hit.t, rel=1e-12)
            assert colors[k] == pytest.approx(shade(hit, depth_rings), abs=1e-12)


def test_trace_rays_checker_cells(checker_room):
    # straight down onto the checkerboard floor: alternating cells
    xs = np.array([0.5, 1.5])
    origins = np.stack([xs, np.full(2, 1.0), np.full(2, 0.5)], axis=1)
    dirs = np.tile(np.array([0.0, -1.0, 0.0]), (2, 1))
    colors, t = trace_rays(checker_room, origins, dirs)
    assert t == pytest.approx([1.0, 1.0])
    assert not np.allclose(colors[0], colors[1])
