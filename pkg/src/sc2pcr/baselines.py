"""Baseline estimators: classic RANSAC and first-order-guided sampling."""

from __future__ import annotations

import time

import numpy as np

from . import _kernels
from .geometry import CorrespondenceSet
from .pipeline import RegistrationConfig, RegistrationResult, run_pipeline
from .solver import DegenerateGeometryError, weighted_svd


def ransac_register(
    corrs: CorrespondenceSet,
    iterations: int = 1000,
    tau: float = 0.1,
    seed: object = 0,
) -> RegistrationResult:
    """Classic hypothesize-and-verify: uniform 3-point samples, most inliers wins.

    Deterministic for a given ``seed`` (Philox stream). Collinear samples are
    skipped but still consume an iteration. Ties keep the earliest iteration.
    """
    if corrs.n < 3:
        raise ValueError("RANSAC needs at least 3 correspondences")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if tau <= 0:
        raise ValueError("tau must be positive")
    rng = np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(seed)))
    ones = np.ones(3)
    t_start = time.perf_counter()

    transforms = []
    for _ in range(iterations):
        pick = rng.choice(corrs.n, size=3, replace=False)
        try:
            transforms.append(weighted_svd(corrs.source[pick], corrs.target[pick], ones))
        except DegenerateGeometryError:
            continue
    if not transforms:
        raise DegenerateGeometryError("every sampled triple was collinear")

    rotations = np.stack([t.rotation for t in transforms])
    translations = np.stack([t.translation for t in transforms])
    counts, _ = _kernels.batch_inlier_counts(
        rotations, translations, corrs.source, corrs.target, tau
    )
    best = int(np.argmax(counts))  # first maximum wins
    mask, count, _ = _kernels.inlier_mask_single(
        rotations[best], translations[best], corrs.source, corrs.target, tau
    )
    return RegistrationResult(
        transform=transforms[best],
        inlier_count=int(count),
        inlier_mask=mask,
        seed_used=best,
        hypotheses_evaluated=len(transforms),
        timings={"total": time.perf_counter() - t_start},
    )


def sc_guided_register(
    corrs: CorrespondenceSet,
    cfg: RegistrationConfig | None = None,
    threads: int | None = None,
) -> RegistrationResult:
    """Ablation: consensus stage 1 ranked by first-order closeness.

    Identical to the full pipeline except stage-1 neighbors are the smallest
    distance differences rather than the largest second-order counts.
    """
    return run_pipeline(corrs, cfg or RegistrationConfig(), threads=threads, stage1_space="sc")
