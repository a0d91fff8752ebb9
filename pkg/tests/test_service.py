import io

import numpy as np
import pytest
from fastapi.testclient import TestClient

from cylstereo import parse_ppm
from cylstereo.service import SCALE_PRESETS, create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(frontend_dir="/nonexistent"))


CENTER = {"x": 0.0, "y": 1.15, "z": 0.0}
LOW = {"scene": "depth-rings", "head": CENTER, "canvas_scale": 0.1, "cube_res": 32}


def test_scenes_listing(client):
    response = client.get("/scenes")
    assert response.status_code == 200
    entries = response.json()
    assert [e["id"] for e in entries] == ["checker-room", "depth-rings", "marker-sweep"]
    assert all(e["primitive_count"] >= 3 for e in entries)
    assert "X-Scene-Warnings" not in response.headers


def test_unreadable_fixture_omitted_with_warning(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(
        '{"background": [0,0,0], "light_dir": [0,-1,0], "primitives": []}'
    )
    bad = tmp_path / "broken.json"
    bad.write_text("{nope")
    app = create_app(extra_scene_dir=str(tmp_path), frontend_dir="/nonexistent")
    with TestClient(app) as local:
        response = local.get("/scenes")
        ids = [e["id"] for e in response.json()]
        assert "good" in ids and "broken" not in ids
        assert response.headers["X-Scene-Warnings"] == "broken"


def test_render_center_low_preset(client):
    response = client.post("/render", json=LOW)
    assert response.status_code == 200
    assert response.headers["X-Pass-Count"] == "6"
    assert float(response.headers["X-Render-Ms"]) > 0
    assert response.headers["content-type"] == "image/png"
    from PIL import Image

    image = Image.open(io.BytesIO(response.content))
    assert image.size == (270, 23)


def test_render_deterministic_bytes(client):
    a = client.post("/render", json=LOW)
    b = client.post("/render", json=LOW)
    assert a.content == b.content


def test_render_ppm_format(client):
    response = client.post("/render", json={**LOW, "format": "ppm"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/x-portable-pixmap")
    image = parse_ppm(response.content)
    assert image.width == 270


def test_render_unknown_scene_404(client):
    response = client.post("/render", json={**LOW, "scene": "missing"})
    assert response.status_code == 404


def test_render_head_outside_422(client):
    response = client.post("/render", json={**LOW, "head": {"x": 4.0, "y": 1.0, "z": 0.0}})
    assert response.status_code == 422
    assert "head" in response.json()["error"]


def test_render_bad_request_400(client):
    for payload in (
        {**LOW, "canvas_scale": 0.3},
        {**LOW, "mode": "warp"},
        {**LOW, "bogus_field": 1},
        {"head": CENTER},  # missing scene
    ):
        response = client.post("/render", json=payload)
        assert response.status_code == 400
        body = response.json()
        assert body["error"] == "invalid request"
        assert body["details"][0]["field"]


def test_pass_count_matches_faces_endpoint(client):
    poses = [CENTER, {"x": 1.8, "y": 1.15, "z": 0.9}, {"x": -2.0, "y": 1.0, "z": -1.1}]
    for head in poses:
        for scale in (0.1, 1.0):
            faces = client.post(
                "/faces", json={"head": head, "ipd": 0.064, "canvas_scale": scale}
            )
            assert faces.status_code == 200
            body = faces.json()
            assert body["count"] == len(body["faces"])
            render = client.post(
                "/render",
                json={**LOW, "head": head, "canvas_scale": scale, "cube_res": 8},
            )
            assert render.status_code == 200
            assert int(render.headers["X-Pass-Count"]) == body["count"]


def test_faces_center_low_scale_is_six(client):
    response = client.post("/faces", json={"head": CENTER, "canvas_scale": 0.1})
    body = response.json()
    assert body["count"] == 6
    labels = {(f["cubemap"], f["face"]) for f in body["faces"]}
    assert labels == {
        ("East", "+Z"), ("West", "+Z"), ("North", "+X"),
        ("South", "+X"), ("North", "-X"), ("South", "-X"),
    }


def test_faces_invalid_head_422(client):
    response = client.post("/faces", json={"head": {"x": 9, "y": 0, "z": 0}})
    assert response.status_code == 422


def test_render_mode_pass_counts(client):
    stitch = client.post("/render", json={**LOW, "mode": "stitch", "slits": 32})
    assert stitch.headers["X-Pass-Count"] == "64"
    oracle = client.post("/render", json={**LOW, "mode": "oracle"})
    assert oracle.headers["X-Pass-Count"] == "2"
    center = client.post("/render", json={**LOW, "mode": "center"})
    assert center.headers["X-Pass-Count"] == "6"


def test_render_degenerate_stitch_422(client):
    # a single slit spanning the whole 270-degree arc puts the chord plane
    # behind the head: rejected, not a server error
    response = client.post("/render", json={**LOW, "mode": "stitch", "slits": 1})
    assert response.status_code == 422


def test_render_diff_mode(client):
    response = client.post("/render", json={**LOW, "mode": "diff", "format": "ppm"})
    assert response.status_code == 200
    assert int(response.headers["X-Pass-Count"]) == 6 + 2
    image = parse_ppm(response.content)
    # grayscale heat image
    assert np.array_equal(image.pixels[..., 0], image.pixels[..., 1])


def test_trace_endpoint(client):
    payload = {
        "scene": "depth-rings", "head": CENTER, "eye": "right",
        "canvas_scale": 0.1, "cube_res": 16, "pixels": [[135, 11], [0, 0]],
    }
    response = client.post("/trace", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["count"] == 2
    first = body["traces"][0]
    assert first["eye"] == "right"
    assert first["cubemap"] in ("North", "East", "South", "West")
    assert len(first["color"]) == 3
    assert 0.0 <= first["u"] <= 1.0


def test_scale_presets_constant():
    assert SCALE_PRESETS == (0.1, 0.2, 0.5, 1.0)
