"""HTTP frame service for the interactive viewer.

Endpoints: GET /scenes, POST /render, POST /faces (plus POST /trace for the
face-inspection panel). Stateless apart from an immutable scene cache
loaded at startup; identical requests return byte-identical bodies.
Renders run in a thread pool behind a FIFO semaphore so a configurable cap
bounds simultaneous work.

Canvas resolution is requested through the ``canvas_scale`` presets
(1/10, 1/5, 1/2, 1 of the 2700x230 default) so the UI cannot request
unbounded work; /faces accepts the same scale so its count always matches
the X-Pass-Count header /render reports for the same pose.
"""

from __future__ import annotations

import asyncio
import os
import time
from typing import Literal

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field, field_validator
from starlette.concurrency import run_in_threadpool

from .errors import DegenerateFrustumError, InputDomainError, SceneParseError
from .geometry import (
    DEFAULT_IPD,
    Eye,
    HeadPose,
    ScreenConfig,
    sort_face_set,
    validate_head,
    visible_faces,
)
from .images import CanvasImage, png_bytes, ppm_bytes, quantize_rgb8
from .projection import (
    StereoCanvas,
    compose,
    render_scs,
    render_scs_center_mode,
    sample_fragment,
)
from .render import render_cubemaps, render_oracle
from .scene import Scene, bundled_scene_names, load_bundled_scene, parse_scene
from .stitch import StitchConfig, render_stitch

SCALE_PRESETS = (0.1, 0.2, 0.5, 1.0)
DEFAULT_PORT = 8787


class HeadModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: float
    y: float
    z: float


class RenderRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scene: str
    head: HeadModel = HeadModel(x=0.0, y=1.15, z=0.0)
    ipd: float = Field(default=DEFAULT_IPD, ge=0.0)
    mode: Literal["scs", "stitch", "oracle", "center", "diff"] = "scs"
    kind: Literal["anaglyph", "left", "right", "sbs"] = "anaglyph"
    cube_res: int = Field(default=256, ge=8, le=1024)
    slits: int = Field(default=32, ge=1, le=1024)
    canvas_scale: float = 1.0
    format: Literal["png", "ppm"] = "png"

    @field_validator("canvas_scale")
    @classmethod
    def _scale_preset(cls, v: float) -> float:
        if v not in SCALE_PRESETS:
            raise ValueError(f"canvas_scale must be one of {SCALE_PRESETS}")
        return v


class FacesRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    head: HeadModel
    ipd: float = Field(default=DEFAULT_IPD, ge=0.0)
    radius: float = 3.0
    height: float = 2.3
    arc: float = 270.0
    canvas_scale: float = 1.0

    @field_validator("canvas_scale")
    @classmethod
    def _scale_preset(cls, v: float) -> float:
        if v not in SCALE_PRESETS:
            raise ValueError(f"canvas_scale must be one of {SCALE_PRESETS}")
        return v


class TraceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scene: str
    head: HeadModel = HeadModel(x=0.0, y=1.15, z=0.0)
    ipd: float = Field(default=DEFAULT_IPD, ge=0.0)
    eye: Literal["left", "right"] = "right"
    cube_res: int = Field(default=64, ge=8, le=1024)
    canvas_scale: float = 0.1
    pixels: list[tuple[int, int]] = Field(min_length=1, max_length=4096)

    @field_validator("canvas_scale")
    @classmethod
    def _scale_preset(cls, v: float) -> float:
        if v not in SCALE_PRESETS:
            raise ValueError(f"canvas_scale must be one of {SCALE_PRESETS}")
        return v


def _scaled_screen(scale: float, radius: float = 3.0, height: float = 2.3,
                   arc: float = 270.0) -> ScreenConfig:
    return ScreenConfig(radius, height, arc,
                        max(1, round(2700 * scale)), max(1, round(230 * scale)))


def _load_registry(extra_dir: str | None) -> tuple[dict[str, Scene], list[str]]:
    scenes: dict[str, Scene] = {}
    warnings: list[str] = []
    for name in bundled_scene_names():
        try:
            scenes[name] = load_bundled_scene(name)
        except SceneParseError:
            warnings.append(name)
    if extra_dir is not None and os.path.isdir(extra_dir):
        for entry in sorted(os.listdir(extra_dir)):
            if not entry.endswith(".json"):
                continue
            name = entry[: -len(".json")]
            try:
                with open(os.path.join(extra_dir, entry), "r", encoding="utf-8") as f:
                    scenes[name] = parse_scene(f.read())
            except (OSError, SceneParseError):
                warnings.append(name)
    return scenes, warnings


def _render_frame(scene: Scene, req: RenderRequest, screen: ScreenConfig) -> tuple[CanvasImage, int]:
    head = HeadPose((req.head.x, req.head.y, req.head.z), ipd=req.ipd)
    if req.mode == "center":
        stereo, passes = render_scs_center_mode(scene, screen, req.cube_res, ipd=req.ipd)
        return compose(stereo, req.kind), passes
    validate_head(head, screen)
    if req.mode == "scs":
        stereo, passes = render_scs(scene, head, screen, req.cube_res)
        return compose(stereo, req.kind), passes
    if req.mode == "stitch":
        config = StitchConfig.for_screen(req.slits, screen)
        stereo, passes = render_stitch(scene, head, screen, config, stereo=True)
        return compose(stereo, req.kind), passes
    if req.mode == "oracle":
        stereo = StereoCanvas(
            render_oracle(scene, head, screen, Eye.LEFT),
            render_oracle(scene, head, screen, Eye.RIGHT),
            screen, head,
        )
        return compose(stereo, req.kind), 2
    # diff: per-pixel |scs - oracle| averaged over eyes and channels, amplified
    stereo, passes = render_scs(scene, head, screen, req.cube_res)
    oracle = StereoCanvas(
        render_oracle(scene, head, screen, Eye.LEFT),
        render_oracle(scene, head, screen, Eye.RIGHT),
        screen, head,
    )
    heat = np.zeros(stereo.left.pixels.shape[:2])
    for a, b in ((stereo.left, oracle.left), (stereo.right, oracle.right)):
        heat += np.mean(
            np.abs(a.pixels.astype(np.float64) - b.pixels.astype(np.float64)), axis=-1
        )
    heat = np.clip(heat / 2.0 / 255.0 * 4.0, 0.0, 1.0)
    gray = quantize_rgb8(np.repeat(heat[..., None], 3, axis=-1))
    return CanvasImage(gray), passes + 2


def create_app(
    extra_scene_dir: str | None = None,
    max_concurrent_renders: int = 2,
    frontend_dir: str = "frontend/dist",
) -> FastAPI:
    scenes, scene_warnings = _load_registry(extra_scene_dir)
    app = FastAPI(title="cylstereo frame service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Pass-Count", "X-Render-Ms", "X-Scene-Warnings"],
    )
    semaphore = asyncio.Semaphore(max(1, max_concurrent_renders))

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "invalid request",
                                                      "details": details})

    @app.exception_handler(InputDomainError)
    async def _unprocessable(request: Request, exc: InputDomainError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(DegenerateFrustumError)
    async def _degenerate(request: Request, exc: DegenerateFrustumError):
        # e.g. a stitch request whose slits span >= 180 degrees for this head
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.get("/scenes")
    async def list_scenes(response: Response):
        if scene_warnings:
            response.headers["X-Scene-Warnings"] = ",".join(scene_warnings)
        return [
            {"id": name, "name": name, "primitive_count": len(scene.primitives)}
            for name, scene in sorted(scenes.items())
        ]

    @app.post("/render")
    async def render(req: RenderRequest):
        scene = scenes.get(req.scene)
        if scene is None:
            return JSONResponse(status_code=404, content={"error": f"unknown scene {req.scene!r}"})
        screen = _scaled_screen(req.canvas_scale)
        async with semaphore:
            t0 = time.perf_counter()
            image, passes = await run_in_threadpool(_render_frame, scene, req, screen)
            wall_ms = (time.perf_counter() - t0) * 1000.0
        if req.format == "png":
            body, media = png_bytes(image), "image/png"
        else:
            body, media = ppm_bytes(image), "image/x-portable-pixmap"
        return Response(
            content=body,
            media_type=media,
            headers={"X-Pass-Count": str(passes), "X-Render-Ms": f"{wall_ms:.2f}"},
        )

    @app.post("/faces")
    async def faces(req: FacesRequest):
        screen = ScreenConfig(
            req.radius, req.height, req.arc,
            max(1, round(2700 * req.canvas_scale)), max(1, round(230 * req.canvas_scale)),
        )
        head = HeadPose((req.head.x, req.head.y, req.head.z), ipd=req.ipd)
        validate_head(head, screen)
        face_set = sort_face_set(visible_faces(head, screen))
        return {
            "faces": [{"cubemap": str(c), "face": str(f)} for c, f in face_set],
            "count": len(face_set),
        }

    @app.post("/trace")
    async def trace(req: TraceRequest):
        scene = scenes.get(req.scene)
        if scene is None:
            return JSONResponse(status_code=404, content={"error": f"unknown scene {req.scene!r}"})
        screen = _scaled_screen(req.canvas_scale)
        head = HeadPose((req.head.x, req.head.y, req.head.z), ipd=req.ipd)
        validate_head(head, screen)
        eye = Eye.LEFT if req.eye == "left" else Eye.RIGHT

        def build():
            face_set = visible_faces(head, screen)
            cubemaps = render_cubemaps(scene, head, face_set, req.cube_res)
            traces = []
            for x, y in req.pixels:
                t = sample_fragment(cubemaps, head, screen, (x, y), eye)
                traces.append({
                    "pixel": list(t.pixel), "eye": t.eye.value,
                    "cubemap": str(t.cubemap), "face": str(t.face),
                    "u": t.u, "v": t.v, "texel": list(t.texel),
                    "color": list(t.color),
                })
            return traces

        async with semaphore:
            traces = await run_in_threadpool(build)
        return {"traces": traces, "count": len(traces)}

    if frontend_dir and os.path.isdir(frontend_dir):
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="viewer")
    return app
