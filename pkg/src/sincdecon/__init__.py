"""Adaptive density deconvolution by penalized projection on sinc spaces."""
from __future__ import annotations

__version__ = "0.1.0"

from .densities import CATALOG, TestDensity, get_density
from .estimator import ProjectionEstimate, coefficients, contrast_path, evaluate, select
from .noise import NoiseKind, NoiseModel
from .penalty import ConfigurationError, PenaltyFamily, PenaltySpec, model_grid, penalty
from .risk import aggregate, ise_exact, ise_interval

__all__ = [
    "CATALOG",
    "TestDensity",
    "get_density",
    "ProjectionEstimate",
    "coefficients",
    "contrast_path",
    "evaluate",
    "select",
    "NoiseKind",
    "NoiseModel",
    "ConfigurationError",
    "PenaltyFamily",
    "PenaltySpec",
    "model_grid",
    "penalty",
    "aggregate",
    "ise_exact",
    "ise_interval",
]
