"""Grayscale image files: PGM (P2/P5, maxval 255) and 8-bit grayscale PNG.

PGM is parsed and written directly so the byte format is fully pinned; PNG
goes through Pillow. Loading maps to [0, 1] by dividing by 255; saving clamps
to [0, 1], scales by 255, and rounds half-to-even.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

from .errors import FormatError
from .scsa2d import Image

FORMAT_PGM_ASCII = "pgm-p2"
FORMAT_PGM_BINARY = "pgm-p5"
FORMAT_PNG = "png"
FORMATS = (FORMAT_PGM_ASCII, FORMAT_PGM_BINARY, FORMAT_PNG)

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\n\r\x0b\x0c"


def format_from_path(path) -> str:
    """Default save format for a file name: .pgm -> binary PGM, .png -> PNG."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return FORMAT_PGM_BINARY
    if suffix == ".png":
        return FORMAT_PNG
    raise FormatError(f"cannot infer image format from {path!r}; pass one of {FORMATS}")


class _Scanner:
    """Cursor over PGM header bytes, skipping whitespace and '#' comments."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos

    def _skip_separators(self):
        while self.pos < len(self.data):
            byte = self.data[self.pos : self.pos + 1]
            if byte in (b"#",):
                end = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if end == -1 else end + 1
            elif byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def next_int(self, what: str) -> int:
        self._skip_separators()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            self.pos += 1
        token = self.data[start : self.pos]
        if not token.isdigit():
            raise FormatError(f"malformed PGM header: expected {what}, got {token!r}")
        return int(token)


def _parse_pgm(data: bytes, origin) -> Image:
    magic = data[:2]
    scanner = _Scanner(data, 2)
    width = scanner.next_int("width")
    height = scanner.next_int("height")
    maxval = scanner.next_int("maxval")
    if width < 1 or height < 1:
        raise FormatError(f"malformed PGM header in {origin}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported PGM maxval {maxval} in {origin}; only 8-bit (255) is handled")

    if magic == b"P2":
        chunks = []
        for line in data[scanner.pos :].splitlines(keepends=True):
            head, hash_sign, _ = line.partition(b"#")
            chunks.append(head + (b"\n" if hash_sign else b""))
        tokens = b"".join(chunks).split()
        if len(tokens) != width * height:
            raise FormatError(
                f"malformed P2 payload in {origin}: expected {width * height} values, "
                f"got {len(tokens)}"
            )
        try:
            flat = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError as exc:
            raise FormatError(f"malformed P2 payload in {origin}: {exc}") from exc
        if flat.min() < 0 or flat.max() > 255:
            raise FormatError(f"P2 sample out of range [0, 255] in {origin}")
        raster = flat.astype(np.uint8)
    else:
        # single whitespace byte separates the header from the raster
        if scanner.pos >= len(data) or data[scanner.pos : scanner.pos + 1] not in _WHITESPACE:
            raise FormatError(f"malformed P5 header in {origin}: missing raster separator")
        start = scanner.pos + 1
        raster = np.frombuffer(data[start : start + width * height], dtype=np.uint8)
        if raster.size != width * height:
            raise FormatError(
                f"malformed P5 payload in {origin}: expected {width * height} bytes, "
                f"got {raster.size}"
            )
    pixels = raster.reshape(height, width).astype(float) / 255.0
    return Image(pixels, delta=1.0, intensity_scale=255.0)


def _load_png(path) -> Image:
    with _PILImage.open(path) as handle:
        if handle.format != "PNG":
            raise FormatError(f"{path}: not a PNG file")
        if handle.mode != "L":
            raise FormatError(
                f"{path}: unsupported PNG mode {handle.mode!r}; only 8-bit grayscale ('L')"
            )
        raster = np.asarray(handle, dtype=np.uint8)
    return Image(raster.astype(float) / 255.0, delta=1.0, intensity_scale=255.0)


def load(path) -> Image:
    """Read a PGM or 8-bit grayscale PNG file into a [0, 1] image."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return _parse_pgm(data, path)
    if data[:8] == _PNG_MAGIC:
        return _load_png(path)
    raise FormatError(f"unrecognized image format in {path}")


def quantize(img: Image) -> np.ndarray:
    """Clamp to [0, 1], scale to 0-255 and round half-to-even."""
    return np.rint(np.clip(img.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)


def save(img: Image, path, format: str | None = None) -> None:
    """Write the image; format defaults from the file extension."""
    fmt = format_from_path(path) if format is None else format
    if fmt not in FORMATS:
        raise FormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    raster = quantize(img)
    rows, cols = raster.shape
    if fmt == FORMAT_PGM_ASCII:
        lines = [f"P2\n{cols} {rows}\n255\n"]
        lines += [" ".join(str(v) for v in row) + "\n" for row in raster]
        Path(path).write_bytes("".join(lines).encode("ascii"))
    elif fmt == FORMAT_PGM_BINARY:
        header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
        Path(path).write_bytes(header + raster.tobytes())
    else:
        _PILImage.fromarray(raster, mode="L").save(path, format="PNG")
