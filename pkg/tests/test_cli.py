import os
import subprocess
import sys

import pytest

from cylstereo import read_image
from cylstereo.cli import main

DESK = ["--canvas", "270x23"]


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_render_scs_summary_and_file(tmp_path, capsys):
    out = tmp_path / "x.ppm"
    code, stdout, _ = run_cli(
        ["render", "--scene", "depth-rings", "--mode", "scs", "--head", "0,1.15,0",
         "--cube-res", "32", "--out", str(out), "--kind", "anaglyph", *DESK],
        capsys,
    )
    assert code == 0
    assert out.exists()
    fields = dict(kv.split("=") for kv in stdout.strip().split())
    assert fields["mode"] == "scs"
    assert fields["passes"] == "6"
    assert float(fields["wall_ms"]) > 0
    image = read_image(str(out))
    assert image.width == 270 and image.height == 23


def test_render_stitch_stereo_passes(tmp_path, capsys):
    out = tmp_path / "s.ppm"
    code, stdout, _ = run_cli(
        ["render", "--scene", "depth-rings", "--mode", "stitch", "--slits", "32",
         "--stereo", "--out", str(out), *DESK],
        capsys,
    )
    assert code == 0
    assert "passes=64" in stdout


def test_render_missing_scene_exits_3(tmp_path, capsys):
    code, _, stderr = run_cli(
        ["render", "--scene", "/nope/missing.json", "--out", str(tmp_path / "x.ppm"), *DESK],
        capsys,
    )
    assert code == 3
    assert stderr.startswith("error: scene:")
    assert "/nope/missing.json" in stderr


def test_render_scene_parse_failure_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    code, _, stderr = run_cli(
        ["render", "--scene", str(bad), "--out", str(tmp_path / "x.ppm"), *DESK], capsys
    )
    assert code == 3
    assert "error: scene:" in stderr


@pytest.mark.parametrize(
    "argv",
    [
        ["render", "--scene", "depth-rings", "--mode", "scs", "--slits", "8", "--out", "x.ppm"],
        ["render", "--scene", "depth-rings", "--mode", "stitch", "--cube-res", "64", "--out", "x.ppm"],
        ["render", "--scene", "depth-rings", "--mode", "stitch", "--kind", "anaglyph", "--out", "x.ppm"],
        ["render", "--scene", "depth-rings", "--mode", "center", "--head", "1,1,1", "--out", "x.ppm"],
        ["render", "--scene", "depth-rings", "--mode", "scs", "--supersample", "2", "--out", "x.ppm"],
        ["render", "--scene", "depth-rings", "--head", "9,1,0", "--out", "x.ppm"],
    ],
)
def test_inconsistent_arguments_exit_2(argv, capsys):
    code, _, stderr = run_cli(argv + DESK, capsys)
    assert code == 2
    assert stderr.startswith("error: args:")


def test_render_kind_both_writes_two_files(tmp_path, capsys):
    out = tmp_path / "pair.ppm"
    code, stdout, _ = run_cli(
        ["render", "--scene", "depth-rings", "--cube-res", "16", "--kind", "both",
         "--out", str(out), *DESK],
        capsys,
    )
    assert code == 0
    assert (tmp_path / "pair.left.ppm").exists()
    assert (tmp_path / "pair.right.ppm").exists()


def test_render_sbs_width(tmp_path, capsys):
    out = tmp_path / "sbs.ppm"
    code, _, _ = run_cli(
        ["render", "--scene", "depth-rings", "--cube-res", "16", "--kind", "sbs",
         "--out", str(out), *DESK],
        capsys,
    )
    assert code == 0
    assert read_image(str(out)).width == 540


def test_render_png(tmp_path, capsys):
    from PIL import Image

    out = tmp_path / "x.png"
    code, _, _ = run_cli(
        ["render", "--scene", "depth-rings", "--cube-res", "16", "--format", "png",
         "--out", str(out), *DESK],
        capsys,
    )
    assert code == 0
    assert Image.open(out).size == (270, 23)


def test_render_oracle_and_center_modes(tmp_path, capsys):
    for mode in ("oracle", "center"):
        out = tmp_path / f"{mode}.ppm"
        code, stdout, _ = run_cli(
            ["render", "--scene", "depth-rings", "--mode", mode, "--out", str(out), *DESK],
            capsys,
        )
        assert code == 0
        assert out.exists()


def test_mono_stitch_single_image(tmp_path, capsys):
    out = tmp_path / "mono.ppm"
    code, stdout, _ = run_cli(
        ["render", "--scene", "depth-rings", "--mode", "stitch", "--slits", "8",
         "--out", str(out), *DESK],
        capsys,
    )
    assert code == 0
    assert "passes=8" in stdout
    assert read_image(str(out)).width == 270


def test_faces_center_head_desk(capsys):
    code, stdout, _ = run_cli(["faces", "--head", "0,1.15,0", *DESK], capsys)
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines == [
        "North.+X", "North.-X", "East.+Z", "South.+X", "South.-X", "West.+Z",
        "count=6",
    ]


def test_faces_full_resolution_includes_boundary_slivers(capsys):
    # at 10 px/degree the exact sampled-face union picks up four thin
    # boundary bands beyond the six bulk faces
    code, stdout, _ = run_cli(["faces", "--head", "0,1.15,0"], capsys)
    assert code == 0
    assert stdout.strip().splitlines()[-1] == "count=10"


def test_faces_invalid_head(capsys):
    code, _, stderr = run_cli(["faces", "--head", "4,1,0", *DESK], capsys)
    assert code == 2
    assert stderr.startswith("error: args:")


def test_faces_zero_ipd_full_arc_tie_broken(capsys):
    code, stdout, _ = run_cli(
        ["faces", "--head", "0,1.15,0", "--ipd", "0", "--arc", "360",
         "--canvas", "360x23"],
        capsys,
    )
    assert code == 0
    lines = stdout.strip().splitlines()
    # zero eye offset always tie-breaks to the North cubemap
    assert lines == ["North.+X", "North.-X", "North.+Z", "North.-Z", "count=4"]


def test_bench_default_includes_6_and_64(capsys):
    code, stdout, _ = run_cli(
        ["bench", "--cube-res", "16", "--modes", "scs,stitch"], capsys
    )
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines[0].startswith("mode,head_x")
    passes = {line.split(",")[0]: line.split(",")[7] for line in lines[1:]}
    assert passes == {"scs": "6", "stitch": "64"}


def test_bench_empty_modes_exit_2(capsys):
    code, _, stderr = run_cli(["bench", "--modes", ""], capsys)
    assert code == 2
    assert "error: args" in stderr


def test_bench_poses_file_rows(tmp_path, capsys):
    poses = tmp_path / "poses.txt"
    poses.write_text("0,1.15,0\n1.0,1.0,0.5\n-0.4,1.4,-1.2\n")
    code, stdout, _ = run_cli(
        ["bench", "--cube-res", "16", "--modes", "scs,oracle",
         "--poses-file", str(poses)],
        capsys,
    )
    assert code == 0
    lines = stdout.strip().splitlines()
    assert len(lines) == 1 + 3 * 2


def test_bench_csv_and_figures_files(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    figdir = tmp_path / "figs"
    code, _, _ = run_cli(
        ["bench", "--cube-res", "16", "--modes", "scs", "--out", str(out),
         "--figures", str(figdir)],
        capsys,
    )
    assert code == 0
    assert out.read_text().startswith("mode,")
    names = sorted(p.name for p in figdir.iterdir())
    assert names == ["bench_error.png", "bench_passes.png", "bench_wall_ms.png"]


def test_cli_end_to_end_determinism(tmp_path):
    """Full-process determinism, independent of the worker thread count."""
    outputs = []
    for workers in ("1", "3", "1"):
        out = tmp_path / f"det-{len(outputs)}.ppm"
        env = {**os.environ, "CYLSTEREO_WORKERS": workers}
        proc = subprocess.run(
            [sys.executable, "-m", "cylstereo.cli", "render", "--scene", "depth-rings",
             "--mode", "oracle", "--kind", "left", "--out", str(out), *DESK],
            env=env, capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_console_script_usage_error_exit_2():
    proc = subprocess.run(
        [sys.executable, "-m", "cylstereo.cli", "render"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 2
