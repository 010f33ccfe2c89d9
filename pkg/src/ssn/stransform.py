"""Three-parameter Stockwell windows and the directional filter bank.

The window family is a Gaussian whose per-axis width is driven by the
frequency it analyses: the width factor at frequency magnitude f is
|k*f**b + c|, so the triple (k, b, c) interpolates between a wavelet bank
(k=1/a, b=1, c=0: widths proportional to frequency) and a fixed-window
STFT bank (k=0, c!=0: one width everywhere). Frequencies are measured in
cycles per image extent per axis, so the channel at radial index p is
centered on DFT bin p.

Conventions, fixed here once for the whole package:

* Width factors are evaluated at component magnitudes |f_i|, which keeps
  the filter family exactly closed under the quarter-turn rotation group.
* Filter spectra are built analytically in the frequency domain as
  periodized (wrap-summed) Gaussians centered at +f_rho, normalized to
  unit peak, i.e. the continuous frequency response sampled on the DFT
  grid. The spatial kernel of a filter is ifft2 of its spectrum.
* A zero width factor is the legitimate wavelet-reduction limit when the
  matching center component is zero: the axis profile collapses to a
  single-bin mask. A zero width anywhere else has no spectral support on
  the grid and is rejected as degenerate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from . import grid
from .errors import DegenerateWindowError

__all__ = [
    "SQRT_2PI",
    "ParameterSet",
    "FilterBank",
    "window_amplitude",
    "rotation_matrix",
    "channel_center",
    "directional_filter_spectrum",
    "lowpass_filter_spectrum",
    "build_filter_bank",
    "st_convolve",
]

SQRT_2PI = float(np.sqrt(2.0 * np.pi))

# Channel index: (p, n) with radial index p >= 1 and rotation index 1 <= n <= N.
Channel = Tuple[int, int]


@dataclass(frozen=True)
class ParameterSet:
    """Window triple (k, b, c): width mode, width changing rate, ST/STFT tradeoff."""

    k: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("k", "b", "c"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"parameter {name} must be finite, got {v!r}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    def width_factor(self, f: float) -> float:
        """|k*f**b + c| at frequency magnitude f >= 0; |c| exactly at f=0."""
        if f < 0:
            raise ValueError(f"width factor takes a frequency magnitude, got {f}")
        if f == 0.0:
            # f**b is ill-defined at f=0 for b <= 0; the zero-frequency width
            # is |c| for every b.
            return abs(self.c)
        return abs(self.k * f**self.b + self.c)

    def astuple(self) -> Tuple[float, float, float]:
        return (self.k, self.b, self.c)


def window_amplitude(params: ParameterSet, f: float) -> float:
    """Gaussian window amplitude |k*f**b + c| / sqrt(2*pi) at magnitude f.

    The reciprocal of the width factor is the spatial standard deviation,
    so a zero factor has no finite-width window and is rejected.
    """
    factor = params.width_factor(float(f))
    if factor == 0.0:
        raise DegenerateWindowError(
            f"window width factor is zero at f={f} for parameters {params.astuple()}"
        )
    return factor / SQRT_2PI


def rotation_matrix(n: int, N: int) -> np.ndarray:
    """Planar rotation by theta_n = 2*pi*n/N as a 2x2 matrix."""
    if N < 1 or not 1 <= n <= N:
        raise ValueError(f"rotation index must satisfy 1 <= n <= N, got n={n}, N={N}")
    theta = 2.0 * np.pi * n / N
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _snap(value: float, tol: float = 1e-9) -> float:
    """Round values that are within tol of an integer (kills trig residue)."""
    r = round(value)
    return float(r) if abs(value - r) < tol else float(value)


def channel_center(p: int, n: int, N: int) -> Tuple[float, float]:
    """Center frequency (fx, fy) of channel (p, n): the reference vector
    (p, 0) carried through the inverse rotation of theta_n."""
    theta = 2.0 * np.pi * n / N
    return _snap(p * np.cos(theta)), _snap(-p * np.sin(theta))


def _signed_bins(m: int) -> np.ndarray:
    """DFT bin frequencies in cycles per extent, in numpy fft order."""
    nu = np.arange(m, dtype=np.float64)
    nu[(m + 1) // 2:] -= m
    return nu


def _axis_profile(m: int, center: float, width: float) -> np.ndarray:
    """Periodized unit-peak Gaussian exp(-2*pi^2*(nu-center)^2/width^2) on m bins.

    Wrap terms are summed until they underflow, so the profile is the exact
    m-periodic spectrum for every width. width == 0 is the single-bin limit.
    """
    nu = _signed_bins(m)
    if width == 0.0:
        offset = np.remainder(nu - center, m)
        return ((offset < 1e-9) | (offset > m - 1e-9)).astype(np.float64)
    # exp underflows around exponent 745; 2*pi^2*d^2/w^2 > 750 is negligible.
    reach = width * np.sqrt(750.0 / (2.0 * np.pi**2))
    wraps = int(np.ceil((reach + abs(center)) / m)) + 1
    r = np.arange(-wraps, wraps + 1, dtype=np.float64)
    d = nu[None, :] - center + (r * m)[:, None]
    return np.exp(-2.0 * np.pi**2 * d**2 / width**2).sum(axis=0)


def _separable_spectrum(
    width: int, height: int, center: Tuple[float, float], factors: Tuple[float, float]
) -> np.ndarray:
    fx = _axis_profile(width, center[0], factors[0])
    fy = _axis_profile(height, center[1], factors[1])
    return np.outer(fy, fx).astype(np.complex128)


def _axis_factor_or_raise(
    params: ParameterSet, component: float, what: str
) -> float:
    factor = params.width_factor(abs(component))
    if factor == 0.0 and component != 0.0:
        # An accidental root of k*f**b + c at a nonzero frequency kills the
        # window outright; only the zero-frequency (wavelet-reduction) limit
        # has a well-defined single-bin spectrum.
        raise DegenerateWindowError(
            f"zero window width at frequency component {component} of {what} "
            f"for parameters {params.astuple()}"
        )
    return factor


def directional_filter_spectrum(
    params: ParameterSet, channel: Channel, N: int, width: int, height: int
) -> np.ndarray:
    """Frequency-domain directional kernel for channel (p, n).

    A separable Gaussian bump centered on the rotated frequency
    r_n^{-1} (p, 0), with per-axis widths taken from the window family at
    the magnitudes of the center components.
    """
    p, n = channel
    if p < 1:
        raise ValueError(f"radial index p must be >= 1, got {p}")
    if not 1 <= n <= N:
        raise ValueError(f"rotation index must satisfy 1 <= n <= N, got n={n}, N={N}")
    cx, cy = channel_center(p, n, N)
    ax = _axis_factor_or_raise(params, cx, f"channel {channel}")
    ay = _axis_factor_or_raise(params, cy, f"channel {channel}")
    return _separable_spectrum(width, height, (cx, cy), (ax, ay))


def lowpass_filter_spectrum(params: ParameterSet, width: int, height: int) -> np.ndarray:
    """Spectrum of the zero-frequency window: a real, non-negative Gaussian
    centered on DC with per-axis width |c|.

    c == 0 is the wavelet-reduction limit and yields the DC-only mask
    (global averaging on the periodic grid).
    """
    a0 = params.width_factor(0.0)
    return _separable_spectrum(width, height, (0.0, 0.0), (a0, a0))


@dataclass(frozen=True)
class FilterBank:
    """Precomputed frequency-domain lowpass and directional bandpass filters."""

    params: ParameterSet
    P: int
    N: int
    width: int
    height: int
    lowpass: np.ndarray
    bandpass: Dict[Channel, np.ndarray]

    @property
    def channels(self) -> Tuple[Channel, ...]:
        return tuple(self.bandpass.keys())


def build_filter_bank(
    params: ParameterSet, P: int, N: int, width: int, height: int
) -> FilterBank:
    """Construct the full bank: one lowpass plus P*N directional filters.

    Deterministic for fixed arguments; degenerate channels are rejected with
    the offending channel named.
    """
    if P < 1 or N < 1:
        raise ValueError(f"bank needs P >= 1 and N >= 1, got P={P}, N={N}")
    if width < 1 or height < 1:
        raise ValueError(f"bank needs a non-empty grid, got {width}x{height}")
    lowpass = lowpass_filter_spectrum(params, width, height)
    bandpass: Dict[Channel, np.ndarray] = {}
    for p in range(1, P + 1):
        for n in range(1, N + 1):
            bandpass[(p, n)] = directional_filter_spectrum(
                params, (p, n), N, width, height
            )
    return FilterBank(params, P, N, width, height, lowpass, bandpass)


def st_convolve(image, filter_spectrum) -> np.ndarray:
    """Circular convolution of an image with a filter given by its spectrum:
    ifft2(fft2(image) * filter_spectrum)."""
    img = np.asarray(image)
    filt = np.asarray(filter_spectrum)
    if img.shape != filt.shape:
        raise ValueError(
            f"image shape {img.shape} does not match filter shape {filt.shape}"
        )
    return grid.ifft2(grid.fft2(img) * filt)
