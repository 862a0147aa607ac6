"""Weighted rigid-transform estimation and inlier-count hypothesis selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import CorrespondenceSet, RigidTransform


class DegenerateGeometryError(ValueError):
    """Point configuration cannot determine a unique rigid transform."""


def weighted_svd(source, target, weights) -> RigidTransform:
    """Closed-form weighted least-squares rigid alignment (Kabsch).

    Minimizes ``sum_i w_i ||R x_i + t - y_i||^2`` via SVD of the weighted
    cross-covariance. The smaller singular-value branch gets a determinant
    correction, which guarantees a proper rotation even when the
    unconstrained optimum would be a reflection.

    Weights must be non-negative; an all-zero weight vector falls back to
    uniform. Fewer than 3 pairs, or (near-)collinear points, raise.
    """
    src = np.asarray(source, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    if src.ndim != 2 or src.shape != tgt.shape or src.shape[1] != 3:
        raise ValueError(f"expected matching (n, 3) arrays, got {src.shape} and {tgt.shape}")
    if src.shape[0] < 3:
        raise ValueError("rigid alignment is under-determined with fewer than 3 pairs")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (src.shape[0],):
        raise ValueError("one weight per pair required")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if total <= 0.0:
        w = np.ones_like(w)
        total = float(len(w))
    w = w / total

    centroid_src = w @ src
    centroid_tgt = w @ tgt
    src_c = src - centroid_src
    tgt_c = tgt - centroid_tgt
    cov = (src_c * w[:, None]).T @ tgt_c

    u, s, vt = np.linalg.svd(cov)
    if s[1] <= s[0] * 1e-10:
        raise DegenerateGeometryError("points are (near-)collinear; rotation is not unique")
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    rotation = v @ np.diag([1.0, 1.0, d]) @ u.T
    translation = centroid_tgt - rotation @ centroid_src
    return RigidTransform(rotation, translation)


def inlier_count(corrs: CorrespondenceSet, transform: RigidTransform, tau: float):
    """Count correspondences with residual strictly below ``tau``.

    Returns ``(count, mask)``; the boundary case residual == tau is excluded.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    mask, count, _ = _kernels.inlier_mask_single(
        transform.rotation, transform.translation, corrs.source, corrs.target, tau
    )
    return int(count), mask


@dataclass(frozen=True)
class Hypothesis:
    """A candidate transform with its provenance and verification score."""

    transform: RigidTransform
    inlier_count: int
    seed: int
    members: np.ndarray
    weights: np.ndarray
    mean_inlier_residual: float = field(default=float("inf"))
    uniform_weight_fallback: bool = False


def select_best(hypotheses) -> Hypothesis:
    """Highest inlier count; ties by smaller mean inlier residual, then seed.

    The tie order is total, so the reduction is associative and the same
    winner emerges from any evaluation order.
    """
    hypotheses = list(hypotheses)
    if not hypotheses:
        raise ValueError("no hypotheses to select from")
    return min(
        hypotheses,
        key=lambda h: (-h.inlier_count, h.mean_inlier_residual, h.seed),
    )
