"""End-to-end registration: compatibility matrices -> seeds -> consensus
sets -> weighted alignment -> inlier-count selection.

The pipeline itself is deterministic: no randomness anywhere, every float
reduction has a fixed order, and per-seed work shares only read-only
matrices, so results are bit-identical across runs and thread counts.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import _kernels
from .compat import (
    distance_difference_matrix,
    hard_compatibility,
    sc2_matrix,
    soft_compatibility,
    soft_sc2,
)
from .geometry import CorrespondenceSet, RigidTransform
from .sampling import (
    DegenerateConsensusError,
    stage1_select,
    stage1_select_by_scores,
    stage2_refine,
)
from .solver import DegenerateGeometryError, Hypothesis, select_best, weighted_svd
from .spectral import leading_eigenvector, select_seeds, spectral_weights


class NoViableHypothesisError(RuntimeError):
    """Every seed produced a degenerate consensus set."""


@dataclass(frozen=True)
class RegistrationConfig:
    """Pipeline parameters. Lengths are meters.

    ``tau`` (verification threshold) and ``nms_radius`` (seed spacing)
    default to ``d_thr``, the only length scale the compatibility analysis
    introduces.
    """

    d_thr: float = 0.1
    tau: float | None = None
    seed_ratio: float = 0.2
    nms_radius: float | None = None
    k1: int = 30
    k2: int = 20
    power_iters: int = 40
    power_tol: float = 1e-6

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", self.d_thr)
        if self.nms_radius is None:
            object.__setattr__(self, "nms_radius", self.d_thr)
        if self.d_thr <= 0:
            raise ValueError("d_thr must be positive")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not 0.0 < self.seed_ratio <= 1.0:
            raise ValueError("seed_ratio must lie in (0, 1]")
        if self.nms_radius < 0:
            raise ValueError("nms_radius must be non-negative")
        if self.k1 < 2:
            raise ValueError("k1 must be >= 2")
        if not 1 <= self.k2 <= self.k1:
            raise ValueError("k2 must satisfy 1 <= k2 <= k1")
        if self.power_iters < 1 or self.power_tol <= 0:
            raise ValueError("power iteration needs iters >= 1 and tol > 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RegistrationConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class RegistrationResult:
    transform: RigidTransform
    inlier_count: int
    inlier_mask: np.ndarray
    seed_used: int
    hypotheses_evaluated: int
    timings: dict = field(default_factory=dict)


def run_pipeline(
    corrs: CorrespondenceSet,
    cfg: RegistrationConfig,
    threads: int | None = None,
    stage1_space: str = "sc2",
) -> RegistrationResult:
    """Shared driver for the registration engine and its first-order ablation.

    ``stage1_space`` selects how stage-1 consensus neighbors are ranked:
    ``"sc2"`` by descending second-order count (the full method), ``"sc"``
    by ascending distance difference (first-order guidance, used as an
    ablation baseline). Everything else is identical.
    """
    if stage1_space not in ("sc2", "sc"):
        raise ValueError(f"unknown stage1_space {stage1_space!r}")
    if corrs.n < 3:
        raise ValueError("registration needs at least 3 correspondences")
    _kernels.set_thread_count(threads)
    timings: dict[str, float] = {}
    t_start = time.perf_counter()

    # Global matrices, shared read-only by every seed.
    dist_diff = distance_difference_matrix(corrs)
    compat = hard_compatibility(dist_diff, cfg.d_thr)
    counts = sc2_matrix(compat)
    keep_dist = stage1_space == "sc"
    soft = soft_compatibility(dist_diff, cfg.d_thr, out=None if keep_dist else dist_diff)
    similarity = soft_sc2(soft)
    timings["matrices"] = time.perf_counter() - t_start

    t0 = time.perf_counter()
    conf = leading_eigenvector(similarity, cfg.power_iters, cfg.power_tol)
    seeds = select_seeds(conf, corrs, cfg.nms_radius, cfg.seed_ratio)
    timings["seeding"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    candidates = []
    for seed in seeds.indices:
        seed = int(seed)
        if stage1_space == "sc2":
            stage1 = stage1_select(counts, seed, cfg.k1)
        else:
            stage1 = stage1_select_by_scores(-dist_diff[seed], seed, cfg.k1)
        try:
            consensus = stage2_refine(corrs, stage1, seed, cfg.d_thr, cfg.k2)
        except DegenerateConsensusError:
            continue
        weights = spectral_weights(consensus.local_soft_sc2, cfg.power_iters, cfg.power_tol)
        try:
            transform = weighted_svd(
                corrs.source[consensus.members],
                corrs.target[consensus.members],
                weights.scores,
            )
        except (ValueError, DegenerateGeometryError):
            continue
        candidates.append((seed, consensus.members, weights, transform))
    timings["sampling"] = time.perf_counter() - t0

    if not candidates:
        raise NoViableHypothesisError("zero viable hypotheses: every seed was degenerate")

    t0 = time.perf_counter()
    rotations = np.stack([c[3].rotation for c in candidates])
    translations = np.stack([c[3].translation for c in candidates])
    inlier_counts, residual_sums = _kernels.batch_inlier_counts(
        rotations, translations, corrs.source, corrs.target, cfg.tau
    )
    hypotheses = [
        Hypothesis(
            transform=transform,
            inlier_count=int(count),
            seed=seed,
            members=members,
            weights=weights.scores,
            mean_inlier_residual=(res / count) if count > 0 else float("inf"),
            uniform_weight_fallback=weights.degenerate,
        )
        for (seed, members, weights, transform), count, res in zip(
            candidates, inlier_counts, residual_sums
        )
    ]
    timings["scoring"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    best = select_best(hypotheses)
    mask, _, _ = _kernels.inlier_mask_single(
        best.transform.rotation, best.transform.translation, corrs.source, corrs.target, cfg.tau
    )
    timings["selection"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start

    return RegistrationResult(
        transform=best.transform,
        inlier_count=best.inlier_count,
        inlier_mask=mask,
        seed_used=best.seed,
        hypotheses_evaluated=len(hypotheses),
        timings=timings,
    )


def register(
    corrs: CorrespondenceSet,
    cfg: RegistrationConfig | None = None,
    threads: int | None = None,
) -> RegistrationResult:
    """Register a correspondence set; see :func:`run_pipeline` for stages."""
    return run_pipeline(corrs, cfg or RegistrationConfig(), threads=threads, stage1_space="sc2")
