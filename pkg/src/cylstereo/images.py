"""Image buffers and bit-exact file I/O.

The canonical interchange format is binary PPM (P6, 8-bit, no comments):
byte-diffable, so golden tests compare files directly. PNG output is
available for human viewing. Canvas row 0 is the bottom of the screen;
files are written top row first.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError


def quantize_rgb8(colors: np.ndarray) -> np.ndarray:
    """Normalized float colors to RGB8, rounding half away from even (np.rint)."""
    return np.clip(np.rint(np.asarray(colors) * 255.0), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class CanvasImage:
    """RGB8 raster; ``pixels[y, x]`` with y = 0 at the bottom of the screen."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise InputDomainError(f"pixels must be (H, W, 3) uint8, got {p.shape} {p.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def ppm_bytes(image: CanvasImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels[::-1].tobytes()


def parse_ppm(data: bytes) -> CanvasImage:
    stream = io.BytesIO(data)
    magic = stream.readline().strip()
    if magic != b"P6":
        raise InputDomainError(f"not a binary PPM (magic {magic!r})")
    dims = stream.readline().split()
    maxval = stream.readline().strip()
    if len(dims) != 2 or maxval != b"255":
        raise InputDomainError("unsupported PPM header")
    w, h = int(dims[0]), int(dims[1])
    raw = stream.read(w * h * 3)
    if len(raw) != w * h * 3:
        raise InputDomainError("truncated PPM payload")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(h, w, 3)[::-1].copy()
    return CanvasImage(pixels)


def png_bytes(image: CanvasImage) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(image.pixels[::-1]).save(buf, format="PNG")
    return buf.getvalue()


def write_image(image: CanvasImage, path: str, fmt: str = "ppm") -> None:
    """Write atomically (temp file + rename) in the requested format."""
    if fmt == "ppm":
        data = ppm_bytes(image)
    elif fmt == "png":
        data = png_bytes(image)
    else:
        raise InputDomainError(f"unknown image format {fmt!r} (expected ppm or png)")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_image(path: str) -> CanvasImage:
    with open(path, "rb") as f:
        return parse_ppm(f.read())
