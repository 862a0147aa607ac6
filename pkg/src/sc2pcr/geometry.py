"""Geometric domain types and rigid-alignment primitives.

All geometry is 64-bit floating point with coordinates in meters. A point is
a length-3 array-like; stacked points are ``(n, 3)`` arrays. Everything here
is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Orthonormality / determinant tolerance checked on every RigidTransform.
# SVD-produced rotations meet this easily; catching drift early localizes bugs.
ROTATION_TOL = 1e-9


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[-1] != 3:
        raise ValueError(f"expected 3D points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid motion: ``p -> rotation @ p + translation``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        tra = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(tra))):
            raise ValueError("transform entries must be finite")
        err = np.max(np.abs(rot.T @ rot - np.eye(3)))
        if err > ROTATION_TOL:
            raise ValueError(f"rotation is not orthonormal (max |R^T R - I| = {err:.3e})")
        det = np.linalg.det(rot)
        if abs(det - 1.0) > ROTATION_TOL:
            raise ValueError(f"rotation must be proper (det = {det!r})")
        rot.flags.writeable = False
        tra.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tra)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class CorrespondenceSet:
    """N putative matches between a source and a target point cloud.

    Index order is stable for the lifetime of a pipeline run; every index
    seen downstream (seeds, consensus members, inlier masks) refers to rows
    of ``source`` / ``target``.
    """

    source: np.ndarray
    target: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        src = _as_points(self.source)
        tgt = _as_points(self.target)
        if src.ndim != 2 or src.shape != tgt.shape:
            raise ValueError(f"source/target shapes differ: {src.shape} vs {tgt.shape}")
        if src.shape[0] < 1:
            raise ValueError("need at least one correspondence")
        src = np.ascontiguousarray(src)
        tgt = np.ascontiguousarray(tgt)
        src.flags.writeable = False
        tgt.flags.writeable = False
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "n", src.shape[0])

    def subset(self, indices) -> "CorrespondenceSet":
        idx = np.asarray(indices, dtype=np.intp)
        return CorrespondenceSet(self.source[idx], self.target[idx])


def apply_transform(transform: RigidTransform, points) -> np.ndarray:
    """Map a point (3,) or point stack (n, 3) through ``R p + t``."""
    pts = _as_points(points)
    return pts @ transform.rotation.T + transform.translation


def compose_residual(transform: RigidTransform, pair) -> float:
    """Alignment residual ``||R x + t - y||`` of one (source, target) pair."""
    src, tgt = pair
    return float(np.linalg.norm(apply_transform(transform, src) - _as_points(tgt)))


def residuals(transform: RigidTransform, corrs: CorrespondenceSet) -> np.ndarray:
    """Per-correspondence alignment residuals, shape (n,)."""
    moved = apply_transform(transform, corrs.source)
    return np.linalg.norm(moved - corrs.target, axis=1)
