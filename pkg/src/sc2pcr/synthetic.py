"""Synthetic correspondence scenes with known ground truth.

A scene plants ``round(n * inlier_ratio)`` inliers whose targets are the
rigidly transformed sources plus isotropic Gaussian noise; outlier targets
are drawn uniformly in the box, independent of their sources. This mirrors
the generative assumptions behind the ambiguity analysis, at the geometry
level.

All randomness flows through the Philox counter-based generator so scenes
are byte-identical across platforms and thread counts. Draw order per scene:
sources, rotation quaternion, translation, inlier slot permutation, box
draws for all targets, then Gaussian noise overwriting the inlier targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CorrespondenceSet, RigidTransform, apply_transform


@dataclass(frozen=True)
class SceneParams:
    n: int
    inlier_ratio: float
    noise_sigma: float
    box_extent: float
    seed: object = 0  # int or tuple of ints (SeedSequence entropy)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("scene needs at least 3 correspondences")
        if not 0.0 < self.inlier_ratio <= 1.0:
            raise ValueError("inlier_ratio must lie in (0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.box_extent <= 0:
            raise ValueError("box_extent must be positive")


@dataclass(frozen=True)
class SyntheticScene:
    corrs: CorrespondenceSet
    gt_transform: RigidTransform
    gt_inliers: np.ndarray
    params: SceneParams


def scene_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(seed)))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Rotation drawn uniformly from SO(3) via a normalized quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def generate_scene(params: SceneParams) -> SyntheticScene:
    rng = scene_rng(params.seed)
    half = params.box_extent / 2.0
    source = rng.uniform(-half, half, size=(params.n, 3))

    rotation = random_rotation(rng)
    translation = rng.uniform(-half, half, size=3)
    transform = RigidTransform(rotation, translation)

    n_inliers = int(round(params.n * params.inlier_ratio))
    inlier_idx = rng.permutation(params.n)[:n_inliers]
    mask = np.zeros(params.n, dtype=bool)
    mask[inlier_idx] = True

    target = rng.uniform(-half, half, size=(params.n, 3))
    moved = apply_transform(transform, source[mask])
    noise = rng.normal(scale=params.noise_sigma, size=moved.shape) if params.noise_sigma > 0 else 0.0
    target[mask] = moved + noise

    return SyntheticScene(
        corrs=CorrespondenceSet(source, target),
        gt_transform=transform,
        gt_inliers=mask,
        params=params,
    )
