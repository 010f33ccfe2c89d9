"""Per-pixel feature assembly, standardization, and training-pixel sampling.

A pixel's feature vector is the cascade of scattering coefficient maps of
both acquisition times, sampled at that pixel: the time-1 block followed by
the time-2 block, paths in enumeration order in both. Standardization is
plain per-column z-scoring fitted on training pixels only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import NumericalError
from .scattering import Path, ScatteringMaps

__all__ = [
    "STD_FLOOR_REL",
    "STD_FLOOR_ABS",
    "standardization_floor",
    "PixelFeatureMatrix",
    "StandardizationStats",
    "LabeledSample",
    "TrainingDraw",
    "CHANGED",
    "UNCHANGED",
    "assemble_features",
    "fit_standardization",
    "apply_standardization",
    "sample_training_pixels",
    "binarize_truth",
]

# Guards for constant feature channels. A column whose spread is within a
# few ulps of its mean level is numerically constant: its deviations are
# rounding residue, so it is floored rather than amplified to unit variance.
# The relative form matters because genuine scattering-map variation can sit
# ten or more decades below the map level while still being far above
# rounding; an absolute floor would wipe it out.
STD_FLOOR_REL = 1e-15
STD_FLOOR_ABS = 1e-300

CHANGED = 1
UNCHANGED = -1


@dataclass(frozen=True)
class PixelFeatureMatrix:
    """Row-per-pixel feature matrix plus the (time tag, path) column labels."""

    values: np.ndarray
    channel_labels: Tuple[Tuple[str, Path], ...]
    width: int
    height: int

    @property
    def pixel_count(self) -> int:
        return self.values.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class StandardizationStats:
    means: np.ndarray
    stddevs: np.ndarray


@dataclass(frozen=True)
class LabeledSample:
    pixel_index: int
    label: int


@dataclass(frozen=True)
class TrainingDraw:
    """Balanced class draw; shortfall records how many pixels each class
    was short of its requested half."""

    samples: Tuple[LabeledSample, ...]
    requested: int
    shortfall: Dict[str, int]

    @property
    def rows(self) -> np.ndarray:
        return np.array([s.pixel_index for s in self.samples], dtype=np.int64)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=np.float64)


def assemble_features(s1: ScatteringMaps, s2: ScatteringMaps) -> PixelFeatureMatrix:
    """Cascade the scattering maps of both times into per-pixel rows."""
    if s1.paths != s2.paths:
        raise ValueError("scattering maps of the two images use different path sets")
    if s1.shape != s2.shape:
        raise ValueError(
            f"scattering maps have mismatched shapes {s1.shape} vs {s2.shape}"
        )
    height, width = s1.shape
    columns = [s1.s_maps[path].ravel() for path in s1.paths]
    columns += [s2.s_maps[path].ravel() for path in s2.paths]
    labels = [("t1", path) for path in s1.paths] + [("t2", path) for path in s2.paths]
    values = np.column_stack(columns)
    if not np.all(np.isfinite(values)):
        raise NumericalError("feature matrix contains non-finite values")
    return PixelFeatureMatrix(values, tuple(labels), width, height)


def standardization_floor(means: np.ndarray) -> np.ndarray:
    """Per-column floor below which a standard deviation counts as constant."""
    return np.maximum(STD_FLOOR_REL * np.abs(means), STD_FLOOR_ABS)


def fit_standardization(
    features: PixelFeatureMatrix, train_rows: Sequence[int]
) -> StandardizationStats:
    """Per-column mean and population standard deviation over training rows only."""
    rows = np.asarray(train_rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot fit standardization on an empty training set")
    sub = features.values[rows]
    means = sub.mean(axis=0)
    stddevs = np.maximum(sub.std(axis=0), standardization_floor(means))
    return StandardizationStats(means, stddevs)


def apply_standardization(
    features: PixelFeatureMatrix, stats: StandardizationStats
) -> PixelFeatureMatrix:
    """Shift and scale every column; labels and shape are preserved."""
    if stats.means.shape[0] != features.feature_dim:
        raise ValueError(
            f"stats dimension {stats.means.shape[0]} does not match "
            f"feature dimension {features.feature_dim}"
        )
    values = (features.values - stats.means) / stats.stddevs
    return PixelFeatureMatrix(
        values, features.channel_labels, features.width, features.height
    )


def binarize_truth(truth) -> np.ndarray:
    """Validate a binary ground-truth field and return it as booleans.

    Accepts {0, v} for a single nonzero level v (e.g. 1 or 255); any nonzero
    pixel counts as changed.
    """
    arr = np.asarray(truth)
    if arr.dtype != bool and not np.all(np.isfinite(arr.astype(np.float64))):
        raise ValueError("truth field contains non-finite values")
    distinct = np.unique(arr)
    if distinct.size > 2:
        raise ValueError(
            f"truth field is not binary: {distinct.size} distinct values"
        )
    nonzero = distinct[distinct != 0]
    if nonzero.size > 1:
        raise ValueError(
            f"truth field is not binary: distinct nonzero values {nonzero.tolist()}"
        )
    return arr != 0


def sample_training_pixels(truth, total: int, seed: int) -> TrainingDraw:
    """Draw a balanced training sample: total/2 changed and total/2 unchanged
    pixel indices, uniformly without replacement per class.

    Deterministic for a fixed seed. A class with fewer pixels than its half
    contributes everything it has, and the deficit is reported in the draw's
    shortfall instead of being topped up from the other class.
    """
    if total <= 0:
        raise ValueError(f"sample total must be positive, got {total}")
    if total % 2 != 0:
        raise ValueError(f"sample total must be even, got {total}")
    mask = binarize_truth(truth)
    changed_idx = np.flatnonzero(mask.ravel())
    unchanged_idx = np.flatnonzero(~mask.ravel())
    half = total // 2
    rng = np.random.default_rng(seed)
    take_changed = min(half, changed_idx.size)
    take_unchanged = min(half, unchanged_idx.size)
    picked_changed = rng.choice(changed_idx, size=take_changed, replace=False)
    picked_unchanged = rng.choice(unchanged_idx, size=take_unchanged, replace=False)
    samples = [LabeledSample(int(i), CHANGED) for i in picked_changed]
    samples += [LabeledSample(int(i), UNCHANGED) for i in picked_unchanged]
    shortfall = {
        "changed": half - take_changed,
        "unchanged": half - take_unchanged,
    }
    return TrainingDraw(tuple(samples), total, shortfall)
