"""8-bit grayscale image I/O: binary PGM (P5) and PNG, bit-exact roundtrips.

Pixel values are read and written as uint8. For pipeline input they are
rescaled to [0, 1] either linearly or through log(1 + x).
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ImageFormatError

__all__ = [
    "PREPROC_MODES",
    "read_grayscale",
    "write_grayscale",
    "read_image",
    "to_unit_range",
]

PREPROC_MODES = ("linear", "log")

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise ImageFormatError(f"{path}: not a binary PGM (P5) file")
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments running to end of line.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        if pos >= len(data):
            raise ImageFormatError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PGM header") from exc
    if maxval <= 0 or maxval > 255:
        raise ImageFormatError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise ImageFormatError(f"{path}: PGM raster is truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _read_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise ImageFormatError(
                    f"{path}: unsupported PNG mode {img.mode!r} "
                    "(8-bit grayscale required)"
                )
            return np.asarray(img, dtype=np.uint8)
    except ImageFormatError:
        raise
    except Exception as exc:
        raise ImageFormatError(f"{path}: unreadable PNG ({exc})") from exc


def read_grayscale(path) -> np.ndarray:
    """Read an 8-bit grayscale PGM or PNG as a uint8 (height, width) array."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"image file not found: {p}")
    head = p.open("rb").read(8)
    if head.startswith(b"P5"):
        return _read_pgm(p)
    if head.startswith(_PNG_MAGIC):
        return _read_png(p)
    raise ImageFormatError(f"{p}: unsupported image format (PGM P5 or PNG expected)")


def write_grayscale(path, values: np.ndarray) -> None:
    """Write a uint8 array as PGM or PNG, chosen by file extension."""
    arr = np.asarray(values)
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixel values, got dtype {arr.dtype}")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
        p.write_bytes(header + arr.tobytes())
    elif p.suffix.lower() == ".png":
        Image.fromarray(arr, mode="L").save(p)
    else:
        raise ValueError(f"unsupported output extension {p.suffix!r} (pgm or png)")


def to_unit_range(raw: np.ndarray, preproc: str = "linear") -> np.ndarray:
    """Map uint8 pixels into [0, 1]: v/255 or log1p(v)/log1p(255)."""
    if preproc not in PREPROC_MODES:
        raise ValueError(f"unknown preprocessing {preproc!r}; expected {PREPROC_MODES}")
    arr = np.asarray(raw, dtype=np.float64)
    if preproc == "linear":
        return arr / 255.0
    return np.log1p(arr) / np.log1p(255.0)


def read_image(path, preproc: str = "linear") -> np.ndarray:
    """Read a grayscale image file and rescale it into [0, 1]."""
    return to_unit_range(read_grayscale(path), preproc)
