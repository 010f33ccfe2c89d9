"""Scattering propagation: iterated filter-modulus cascades over channel paths.

A path is an ordered sequence of filter channels. Propagating an image
along a path applies, per step, a directional filter followed by the
pointwise complex modulus; smoothing any propagated field with the bank's
lowpass yields its scattering coefficient map. Maps keep the full input
resolution throughout, since every pixel is classified downstream.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from . import grid
from .errors import NumericalError
from .stransform import Channel, FilterBank, st_convolve

__all__ = [
    "Path",
    "PATH_RULES",
    "ScatteringMaps",
    "enumerate_paths",
    "propagate",
    "scatter",
    "bank_frame_bound",
]

Path = Tuple[Channel, ...]

PATH_RULES = ("all", "frequency-decreasing")

# Residual imaginary magnitude tolerated on lowpass outputs of real fields.
_IMAG_RESIDUE_TOL = 1e-10


def _admissible(path: Path, channel: Channel, rule: str) -> bool:
    if rule == "all":
        return True
    if rule == "frequency-decreasing":
        return not path or channel[0] < path[-1][0]
    raise ValueError(f"unknown path rule {rule!r}; expected one of {PATH_RULES}")


def enumerate_paths(P: int, N: int, max_len: int, rule: str = "all") -> List[Path]:
    """All admitted paths of length 0..max_len in length-major lexicographic order.

    Rule "all" admits every ordered channel sequence; "frequency-decreasing"
    admits only paths whose radial index strictly decreases along the sequence.
    """
    if max_len < 0:
        raise ValueError(f"max_len must be >= 0, got {max_len}")
    if rule not in PATH_RULES:
        raise ValueError(f"unknown path rule {rule!r}; expected one of {PATH_RULES}")
    channels = [(p, n) for p in range(1, P + 1) for n in range(1, N + 1)]
    paths: List[Path] = [()]
    frontier: List[Path] = [()]
    for _ in range(max_len):
        frontier = [
            path + (ch,)
            for path in frontier
            for ch in channels
            if _admissible(path, ch, rule)
        ]
        paths.extend(frontier)
    return paths


def _lowpass_real(spectrum: np.ndarray, bank: FilterBank) -> np.ndarray:
    out = grid.ifft2(spectrum * bank.lowpass)
    residue = float(np.max(np.abs(out.imag)))
    if residue >= _IMAG_RESIDUE_TOL:
        raise NumericalError(
            f"lowpass output has imaginary residue {residue:.3e} "
            f"(expected < {_IMAG_RESIDUE_TOL:.0e})"
        )
    return out.real


def propagate(field, bank: FilterBank):
    """One scattering layer: lowpass average plus per-channel filter moduli.

    Returns (lowpass_out, modulus_outs) where modulus_outs maps each channel
    (p, n) to the complex magnitude of the filtered field.
    """
    arr = grid.as_real_field(field)
    if arr.shape != (bank.height, bank.width):
        raise ValueError(
            f"field shape {arr.shape} does not match bank grid "
            f"{(bank.height, bank.width)}"
        )
    spectrum = grid.fft2(arr)
    lowpass_out = _lowpass_real(spectrum, bank)
    modulus_outs = {
        ch: np.abs(grid.ifft2(spectrum * filt)) for ch, filt in bank.bandpass.items()
    }
    return lowpass_out, modulus_outs


@dataclass(frozen=True)
class ScatteringMaps:
    """All propagated fields U and scattering coefficient maps S, keyed by path.

    u_maps holds the input itself under the empty path and the modulus fields
    for retained paths shorter than the network depth; s_maps holds the
    lowpass-smoothed coefficients for every retained path up to and including
    the final layer.
    """

    order: int
    paths: Tuple[Path, ...]
    u_maps: Dict[Path, np.ndarray]
    s_maps: Dict[Path, np.ndarray]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.u_maps[()].shape


def scatter(
    image,
    bank: FilterBank,
    order: int,
    rule: str = "frequency-decreasing",
    threads: int = 1,
) -> ScatteringMaps:
    """Run the scattering network of the given depth over one image.

    Breadth-first over layers: each retained field is smoothed into its S map,
    and, below the final layer, extended through every admissible channel via
    filter modulus. Deterministic regardless of thread count.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    arr = grid.as_real_field(image)
    if arr.shape != (bank.height, bank.width):
        raise ValueError(
            f"image shape {arr.shape} does not match bank grid "
            f"{(bank.height, bank.width)}"
        )
    paths = enumerate_paths(bank.P, bank.N, order, rule)
    u_maps: Dict[Path, np.ndarray] = {}
    s_maps: Dict[Path, np.ndarray] = {}
    frontier: Dict[Path, np.ndarray] = {(): arr}

    def process(path_field):
        path, field = path_field
        spectrum = grid.fft2(field)
        s_map = _lowpass_real(spectrum, bank)
        children = []
        if len(path) < order:
            for ch in bank.channels:
                if _admissible(path, ch, rule):
                    children.append(
                        (path + (ch,), np.abs(grid.ifft2(spectrum * bank.bandpass[ch])))
                    )
        return path, s_map, children

    for layer in range(order + 1):
        items = sorted(frontier.items(), key=lambda kv: kv[0])
        if threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(process, items))
        else:
            results = [process(item) for item in items]
        next_frontier: Dict[Path, np.ndarray] = {}
        for path, s_map, children in results:
            s_maps[path] = s_map
            if layer < order:
                u_maps[path] = frontier[path]
            for child_path, child_field in children:
                next_frontier[child_path] = child_field
        frontier = next_frontier
    return ScatteringMaps(order, tuple(paths), u_maps, s_maps)


def bank_frame_bound(bank: FilterBank) -> float:
    """Upper frame bound of the bandpass set: the max over frequency bins of
    the summed squared filter magnitudes."""
    acc = np.zeros((bank.height, bank.width))
    for filt in bank.bandpass.values():
        acc += np.abs(filt) ** 2
    return float(acc.max())
