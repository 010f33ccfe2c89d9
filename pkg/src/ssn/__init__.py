"""Stockwell scattering network for bitemporal SAR change detection.

A fixed-filter feature extractor built from the three-parameter Stockwell
transform, cascaded with modulus nonlinearities and lowpass smoothing,
feeding a Gaussian-kernel SVM for pixel-wise change classification.
"""

__version__ = "0.1.0"

from .stransform import ParameterSet, FilterBank, build_filter_bank, st_convolve
from .scattering import ScatteringMaps, enumerate_paths, propagate, scatter
from .features import assemble_features, sample_training_pixels
from .svm import SvmModel, train_svm, predict
from .metrics import ConfusionMatrix, MetricsReport, confusion
from .datagen import SceneSpec, Rect, Disk, generate_scene

__all__ = [
    "__version__",
    "ParameterSet",
    "FilterBank",
    "build_filter_bank",
    "st_convolve",
    "ScatteringMaps",
    "enumerate_paths",
    "propagate",
    "scatter",
    "assemble_features",
    "sample_training_pixels",
    "SvmModel",
    "train_svm",
    "predict",
    "ConfusionMatrix",
    "MetricsReport",
    "confusion",
    "SceneSpec",
    "Rect",
    "Disk",
    "generate_scene",
]
