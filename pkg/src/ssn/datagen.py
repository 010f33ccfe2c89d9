"""Synthetic bitemporal SAR scenes with multiplicative speckle and known truth.

The intensity noise model is standard L-look speckle: unit-mean gamma
multipliers with shape L and scale 1/L (variance 1/L), drawn independently
per pixel and per acquisition. Shapes are rasterized by pixel-center
inclusion, so truth areas are exactly reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

__all__ = [
    "Rect",
    "Disk",
    "SceneSpec",
    "generate_scene",
    "speckle_field",
    "shapes_from_dicts",
    "scene_spec_from_dict",
]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: center (cx, cy), full side lengths."""

    cx: float
    cy: float
    width: float
    height: float

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (np.abs(xs - self.cx) <= self.width / 2.0) & (
            np.abs(ys - self.cy) <= self.height / 2.0
        )

    def bounds(self) -> Tuple[float, float, float, float]:
        return (
            self.cx - self.width / 2.0,
            self.cx + self.width / 2.0,
            self.cy - self.height / 2.0,
            self.cy + self.height / 2.0,
        )


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (xs - self.cx) ** 2 + (ys - self.cy) ** 2 <= self.radius**2

    def bounds(self) -> Tuple[float, float, float, float]:
        return (
            self.cx - self.radius,
            self.cx + self.radius,
            self.cy - self.radius,
            self.cy + self.radius,
        )


Shape = Union[Rect, Disk]


@dataclass(frozen=True)
class SceneSpec:
    """Scene description: grid size, reflectivity levels, change shapes,
    speckle severity (looks; smaller is noisier), and the generator seed."""

    width: int
    height: int
    background_level: float = 0.16
    changed_level: float = 0.55
    change_shapes: Tuple[Shape, ...] = field(default_factory=tuple)
    looks: int = 4
    seed: int = 0

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"scene grid must be >= 1x1, got {self.width}x{self.height}")
        if self.background_level < 0 or self.changed_level < 0:
            raise ValueError("reflectivity levels must be non-negative")
        if self.background_level == self.changed_level:
            raise ValueError("background and changed levels must be distinct")
        if self.looks < 1:
            raise ValueError(f"looks must be >= 1, got {self.looks}")
        for shape in self.change_shapes:
            x0, x1, y0, y1 = shape.bounds()
            if x0 < -0.5 or y0 < -0.5 or x1 > self.width - 0.5 or y1 > self.height - 0.5:
                raise ValueError(f"shape {shape} extends beyond the scene grid")


def speckle_field(
    shape: Tuple[int, int], looks: int, rng: np.random.Generator
) -> np.ndarray:
    """Unit-mean gamma multipliers: shape parameter looks, variance 1/looks."""
    return rng.gamma(shape=float(looks), scale=1.0 / looks, size=shape)


def generate_scene(spec: SceneSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Produce (image_t1, image_t2, truth) for a scene specification.

    Time 1 is the background level everywhere; time 2 carries the changed
    level inside the shapes. Each image is multiplied by its own speckle
    field. truth is the boolean shape mask. Deterministic per seed: the
    time-1 speckle field is always drawn first.
    """
    spec.validate()
    xs = np.arange(spec.width, dtype=np.float64)[None, :]
    ys = np.arange(spec.height, dtype=np.float64)[:, None]
    truth = np.zeros((spec.height, spec.width), dtype=bool)
    for shape in spec.change_shapes:
        truth |= shape.mask(xs, ys)
    clean_t1 = np.full((spec.height, spec.width), spec.background_level)
    clean_t2 = np.where(truth, spec.changed_level, spec.background_level)
    rng = np.random.default_rng(spec.seed)
    image_t1 = clean_t1 * speckle_field(clean_t1.shape, spec.looks, rng)
    image_t2 = clean_t2 * speckle_field(clean_t2.shape, spec.looks, rng)
    return image_t1, image_t2, truth


def shapes_from_dicts(raw: List[dict]) -> Tuple[Shape, ...]:
    """Parse shape descriptions of the form produced by scene spec files."""
    shapes: List[Shape] = []
    for entry in raw:
        kind = entry.get("type")
        if kind == "rect":
            shapes.append(
                Rect(entry["cx"], entry["cy"], entry["width"], entry["height"])
            )
        elif kind == "disk":
            shapes.append(Disk(entry["cx"], entry["cy"], entry["radius"]))
        else:
            raise ValueError(f"unknown shape type {kind!r} (expected rect or disk)")
    return tuple(shapes)


def scene_spec_from_dict(raw: dict) -> SceneSpec:
    """Build a SceneSpec from a parsed JSON object."""
    try:
        return SceneSpec(
            width=int(raw["width"]),
            height=int(raw["height"]),
            background_level=float(raw.get("background_level", 0.16)),
            changed_level=float(raw.get("changed_level", 0.55)),
            change_shapes=shapes_from_dicts(raw.get("shapes", [])),
            looks=int(raw.get("looks", 4)),
            seed=int(raw.get("seed", 0)),
        )
    except KeyError as exc:
        raise ValueError(f"scene spec is missing required field {exc}") from exc
