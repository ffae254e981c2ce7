"""8-bit grayscale rasters and binary PGM (P5) input/output."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit grayscale image stored row-major as ``(height, width)``."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.uint8, copy=True, order="C")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image must be a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @classmethod
    def blank(cls, width: int, height: int, value: int = 255) -> GrayImage:
        return cls(np.full((height, width), value, dtype=np.uint8))

    def to_bytes(self) -> bytes:
        return encode_pgm(self)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


_HEADER_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def decode_pgm(raw: bytes) -> GrayImage:
    """Parse a binary P5 PGM with maxval 255 (comments in the header allowed)."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _HEADER_TOKEN.match(raw, pos)
        if m is None:
            raise DatasetError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic, w, h, maxval = tokens
    if magic != b"P5":
        raise DatasetError(f"not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise DatasetError("malformed PGM header") from exc
    if maxval != 255:
        raise DatasetError(f"only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    body = raw[pos:pos + width * height]
    if len(body) != width * height:
        raise DatasetError("truncated PGM pixel data")
    return GrayImage(np.frombuffer(body, dtype=np.uint8).reshape(height, width))


def write_pgm(img: GrayImage, path) -> None:
    try:
        Path(path).write_bytes(encode_pgm(img))
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def read_pgm(path) -> GrayImage:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    return decode_pgm(raw)
