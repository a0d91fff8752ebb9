"""Command-line entry point.

Subcommands: ``render`` (images), ``faces`` (culling inspection), ``bench``
(CSV sweep plus figures), ``serve`` (HTTP frame service). Identical
invocations produce byte-identical image files; the CYLSTEREO_WORKERS
environment variable caps render threads without changing output.

Exit codes: 2 bad arguments, 3 scene parse failure, 4 render error,
5 I/O failure. Error lines are printed as ``error: <category>: <reason>``.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import analysis
from .errors import CylstereoError, InputDomainError, SceneParseError
from .geometry import (
    DEFAULT_IPD,
    Eye,
    HeadPose,
    ScreenConfig,
    sort_face_set,
    validate_head,
    visible_faces,
)
from .images import CanvasImage, write_image
from .projection import StereoCanvas, compose, render_scs, render_scs_center_mode
from .render import render_oracle
from .scene import load_scene
from .stitch import StitchConfig, render_stitch

EXIT_BAD_ARGS = 2
EXIT_SCENE = 3
EXIT_RENDER = 4
EXIT_IO = 5

MODES = ("scs", "stitch", "oracle", "center")
KINDS = ("left", "right", "both", "anaglyph", "sbs")


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


def _parse_canvas(value: str) -> tuple[int, int]:
    try:
        w, h = value.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {value!r}")


def _parse_head(value: str) -> tuple[float, float, float]:
    try:
        x, y, z = (float(v) for v in value.split(","))
        return x, y, z
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {value!r}")


def _add_screen_args(parser: argparse.ArgumentParser, canvas_default: str) -> None:
    parser.add_argument("--radius", type=float, default=3.0, help="cylinder radius, m")
    parser.add_argument("--height", type=float, default=2.3, help="screen height, m")
    parser.add_argument("--arc", type=float, default=270.0, help="screen arc, degrees")
    parser.add_argument(
        "--canvas", type=_parse_canvas, default=_parse_canvas(canvas_default),
        metavar="WxH", help=f"canvas resolution (default {canvas_default})",
    )


def _screen(args) -> ScreenConfig:
    w, h = args.canvas
    return ScreenConfig(args.radius, args.height, args.arc, w, h)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cylstereo",
        description="Stereo rendering for cylindrical screens: cubemap pipeline, "
        "slit-stitch baseline, raytrace oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a scene to image file(s)")
    _add_screen_args(render, "2700x230")
    render.add_argument("--scene", required=True, help="bundled fixture name or file path")
    render.add_argument("--mode", choices=MODES, default="scs")
    render.add_argument("--head", type=_parse_head, default=None, metavar="X,Y,Z",
                        help="head position (default: screen center)")
    render.add_argument("--ipd", type=float, default=DEFAULT_IPD)
    render.add_argument("--cube-res", type=int, default=None,
                        help="cubemap face resolution (scs/center only; default 256)")
    render.add_argument("--slits", type=int, default=None,
                        help="slit count (stitch only; default 32)")
    render.add_argument("--stereo", action="store_true",
                        help="stitch: render one pass per eye")
    render.add_argument("--kind", choices=KINDS, default=None,
                        help="stereo output kind (default anaglyph)")
    render.add_argument("--filter", choices=("nearest", "bilinear"), default="nearest",
                        help="cubemap sampling filter (scs/center only)")
    render.add_argument("--supersample", type=int, default=1,
                        help="oracle subpixel grid (oracle only)")
    render.add_argument("--full-ipd-offset", action="store_true",
                        help="offset each cubemap a whole IPD instead of half")
    render.add_argument("--out", required=True, help="output image path")
    render.add_argument("--format", choices=("ppm", "png"), default="ppm")
    render.add_argument("--seed", type=int, default=None,
                        help="reserved; the pipeline is deterministic")

    faces = sub.add_parser("faces", help="print the visible (cubemap, face) set")
    _add_screen_args(faces, "2700x230")
    faces.add_argument("--head", type=_parse_head, default=None, metavar="X,Y,Z")
    faces.add_argument("--ipd", type=float, default=DEFAULT_IPD)

    bench = sub.add_parser("bench", help="benchmark sweep: CSV plus figures")
    _add_screen_args(bench, "270x23")
    bench.add_argument("--scene", default="depth-rings")
    bench.add_argument("--modes", default="scs,stitch",
                       help="comma list from scs,stitch,oracle")
    bench.add_argument("--cube-res", default="256", help="comma list for scs rows")
    bench.add_argument("--slits", default="32", help="comma list for stitch rows")
    bench.add_argument("--poses-file", default=None,
                       help="file of head positions, one x,y,z per line")
    bench.add_argument("--ipd", type=float, default=DEFAULT_IPD)
    bench.add_argument("--out", default="-", help="CSV path, or - for stdout")
    bench.add_argument("--figures", default=None, metavar="DIR",
                       help="also write bench figures into DIR")

    serve = sub.add_parser("serve", help="run the HTTP frame service")
    serve.add_argument("--port", type=int, default=8787)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--max-renders", type=int, default=2,
                       help="simultaneous render cap (excess requests queue)")
    return parser


def _default_head(args, screen: ScreenConfig) -> HeadPose:
    pos = args.head if args.head is not None else (0.0, screen.height / 2, 0.0)
    try:
        head = HeadPose(pos, ipd=args.ipd)
        validate_head(head, screen)
    except InputDomainError as exc:
        raise CliError("args", str(exc), EXIT_BAD_ARGS)
    return head


def _cmd_render(args) -> int:
    screen = _screen(args)
    if args.slits is not None and args.mode != "stitch":
        raise CliError("args", "--slits only applies to --mode stitch", EXIT_BAD_ARGS)
    if args.cube_res is not None and args.mode not in ("scs", "center"):
        raise CliError("args", "--cube-res only applies to scs/center modes", EXIT_BAD_ARGS)
    if args.supersample != 1 and args.mode != "oracle":
        raise CliError("args", "--supersample only applies to --mode oracle", EXIT_BAD_ARGS)
    if args.stereo and args.mode != "stitch":
        raise CliError("args", "--stereo only applies to --mode stitch", EXIT_BAD_ARGS)
    if args.mode == "center" and args.head is not None:
        raise CliError("args", "center mode pins the head; do not pass --head", EXIT_BAD_ARGS)

    try:
        scene = load_scene(args.scene)
    except SceneParseError as exc:
        raise CliError("scene", str(exc), EXIT_SCENE)

    mono_stitch = args.mode == "stitch" and not args.stereo
    if mono_stitch and args.kind is not None:
        raise CliError("args", "mono stitch produces a single image; --kind needs --stereo",
                       EXIT_BAD_ARGS)
    kind = args.kind or "anaglyph"
    cube_res = args.cube_res or 256
    slits = args.slits or 32

    t0 = time.perf_counter()
    try:
        if args.mode == "scs":
            head = _default_head(args, screen)
            stereo, passes = render_scs(scene, head, screen, cube_res,
                                        filter=args.filter,
                                        full_offset=args.full_ipd_offset)
        elif args.mode == "center":
            stereo, passes = render_scs_center_mode(scene, screen, cube_res,
                                                    ipd=args.ipd, filter=args.filter)
        elif args.mode == "stitch":
            head = _default_head(args, screen)
            config = StitchConfig.for_screen(slits, screen)
            result, passes = render_stitch(scene, head, screen, config, stereo=args.stereo)
            if mono_stitch:
                return _write_outputs(args, [(args.out, result)], passes, t0)
            stereo = result
        else:
            head = _default_head(args, screen)
            left = render_oracle(scene, head, screen, Eye.LEFT, args.supersample)
            right = render_oracle(scene, head, screen, Eye.RIGHT, args.supersample)
            stereo = StereoCanvas(left, right, screen, head)
            passes = 2
    except CliError:
        raise
    except CylstereoError as exc:
        raise CliError("render", str(exc), EXIT_RENDER)

    if kind == "both":
        base, ext = os.path.splitext(args.out)
        outputs = [(f"{base}.left{ext}", stereo.left), (f"{base}.right{ext}", stereo.right)]
    else:
        outputs = [(args.out, compose(stereo, kind))]
    return _write_outputs(args, outputs, passes, t0)


def _write_outputs(args, outputs: list[tuple[str, CanvasImage]], passes: int, t0: float) -> int:
    try:
        for path, image in outputs:
            write_image(image, path, args.format)
    except OSError as exc:
        raise CliError("io", str(exc), EXIT_IO)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    names = ",".join(path for path, _ in outputs)
    print(f"mode={args.mode} passes={passes} wall_ms={wall_ms:.1f} out={names}")
    return 0


def _cmd_faces(args) -> int:
    screen = _screen(args)
    head = _default_head(args, screen)
    faces = visible_faces(head, screen)
    for cardinal, face in sort_face_set(faces):
        print(f"{cardinal}.{face}")
    print(f"count={len(faces)}")
    return 0


def _cmd_bench(args) -> int:
    screen = _screen(args)
    modes = [m for m in args.modes.split(",") if m]
    if not modes:
        raise CliError("args", "--modes list is empty", EXIT_BAD_ARGS)
    for mode in modes:
        if mode not in analysis.MODES:
            raise CliError("args", f"unknown mode {mode!r}", EXIT_BAD_ARGS)
    try:
        cube_res = tuple(int(v) for v in args.cube_res.split(",") if v)
        slits = tuple(int(v) for v in args.slits.split(",") if v)
    except ValueError as exc:
        raise CliError("args", f"bad resolution list: {exc}", EXIT_BAD_ARGS)

    if args.poses_file is not None:
        try:
            with open(args.poses_file, "r", encoding="utf-8") as f:
                lines = [ln.strip() for ln in f if ln.strip()]
        except OSError as exc:
            raise CliError("io", str(exc), EXIT_IO)
        try:
            positions = [_parse_head(ln) for ln in lines]
        except argparse.ArgumentTypeError as exc:
            raise CliError("args", str(exc), EXIT_BAD_ARGS)
    else:
        positions = [(0.0, screen.height / 2, 0.0)]
    heads = []
    for pos in positions:
        head = HeadPose(pos, ipd=args.ipd)
        try:
            validate_head(head, screen)
        except InputDomainError as exc:
            raise CliError("args", str(exc), EXIT_BAD_ARGS)
        heads.append(head)

    try:
        scene = load_scene(args.scene)
    except SceneParseError as exc:
        raise CliError("scene", str(exc), EXIT_SCENE)
    try:
        rows = analysis.bench_sweep(scene, screen, heads, modes,
                                    cube_resolutions=cube_res, slit_counts=slits)
    except CylstereoError as exc:
        raise CliError("render", str(exc), EXIT_RENDER)

    csv_text = analysis.bench_csv(rows)
    if args.out == "-":
        sys.stdout.write(csv_text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(csv_text)
        except OSError as exc:
            raise CliError("io", str(exc), EXIT_IO)
    if args.figures is not None:
        from . import report

        try:
            report.write_bench_figures(rows, args.figures)
        except OSError as exc:
            raise CliError("io", str(exc), EXIT_IO)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_concurrent_renders=args.max_renders)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "render": _cmd_render,
        "faces": _cmd_faces,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return exc.code
    except SceneParseError as exc:
        print(f"error: scene: {exc}", file=sys.stderr)
        return EXIT_SCENE
    except InputDomainError as exc:
        print(f"error: args: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except CylstereoError as exc:
        print(f"error: render: {exc}", file=sys.stderr)
        return EXIT_RENDER
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
