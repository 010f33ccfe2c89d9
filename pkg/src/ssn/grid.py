"""2-D raster and spectral primitives: field validation, DFTs, circular shifts.

Fields are numpy arrays of shape (height, width), row-major. All spatial
convolutions downstream are circular (periodic boundary), so the DFT pair
here is the single source of spectral truth: unnormalized forward,
1/(width*height) on the inverse, which matches the convolution theorem
without extra factors. Arbitrary (non power of two) sizes are supported.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalError

__all__ = [
    "as_real_field",
    "as_complex_field",
    "fft2",
    "ifft2",
    "circular_shift",
]


def _check_shape(values: np.ndarray) -> None:
    if values.ndim != 2:
        raise ValueError(f"field must be 2-D, got shape {values.shape}")
    if values.shape[0] < 1 or values.shape[1] < 1:
        raise ValueError(f"field must be at least 1x1, got shape {values.shape}")


def as_real_field(values) -> np.ndarray:
    """Validate and return a float64 field of shape (height, width)."""
    arr = np.asarray(values, dtype=np.float64)
    _check_shape(arr)
    if not np.all(np.isfinite(arr)):
        raise NumericalError("real field contains NaN or Inf")
    return arr


def as_complex_field(values) -> np.ndarray:
    """Validate and return a complex128 field of shape (height, width)."""
    arr = np.asarray(values, dtype=np.complex128)
    _check_shape(arr)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise NumericalError("complex field contains NaN or Inf")
    return arr


def fft2(field) -> np.ndarray:
    """Unnormalized forward 2-D DFT of a (height, width) field."""
    arr = np.asarray(field)
    _check_shape(arr)
    return np.fft.fft2(arr)


def ifft2(spectrum) -> np.ndarray:
    """Inverse 2-D DFT with the 1/(width*height) factor."""
    arr = np.asarray(spectrum)
    _check_shape(arr)
    return np.fft.ifft2(arr)


def circular_shift(field, dx: int, dy: int) -> np.ndarray:
    """Cyclically translate a field by (dx, dy) pixels.

    Output at (x, y) equals input at ((x - dx) mod width, (y - dy) mod height);
    shifts compose additively and wrap modulo the field size.
    """
    arr = np.asarray(field)
    _check_shape(arr)
    return np.roll(arr, shift=(int(dy), int(dx)), axis=(0, 1))
