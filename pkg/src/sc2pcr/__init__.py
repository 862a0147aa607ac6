"""Rigid point-cloud registration from putative correspondences.

The engine scores correspondence pairs by second-order spatial compatibility
(how many other correspondences are compatible with both), grows consensus
sets around spectrally selected seeds, solves each with a weighted SVD, and
keeps the hypothesis with the most inliers. The package also ships the
ambiguity-probability analysis the measure is built on, a synthetic
benchmark harness with a RANSAC baseline, a FastAPI service, and a CLI.
"""

from .compat import (
    HardCompat,
    distance_difference_matrix,
    hard_compatibility,
    sc2_matrix,
    soft_compatibility,
    soft_sc2,
)
from .geometry import (
    CorrespondenceSet,
    RigidTransform,
    apply_transform,
    compose_residual,
    residuals,
)
from .pipeline import (
    NoViableHypothesisError,
    RegistrationConfig,
    RegistrationResult,
    register,
)
from .solver import DegenerateGeometryError, Hypothesis, inlier_count, select_best, weighted_svd
from .synthetic import SceneParams, SyntheticScene, generate_scene

__version__ = "0.1.0"

__all__ = [
    "CorrespondenceSet",
    "DegenerateGeometryError",
    "HardCompat",
    "Hypothesis",
    "NoViableHypothesisError",
    "RegistrationConfig",
    "RegistrationResult",
    "RigidTransform",
    "SceneParams",
    "SyntheticScene",
    "apply_transform",
    "compose_residual",
    "distance_difference_matrix",
    "generate_scene",
    "hard_compatibility",
    "inlier_count",
    "register",
    "residuals",
    "sc2_matrix",
    "select_best",
    "soft_compatibility",
    "soft_sc2",
    "weighted_svd",
]
