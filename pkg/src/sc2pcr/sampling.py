"""Two-stage coarse-to-fine consensus set sampling around each seed.

Stage 1 gathers the seed's strongest partners under the global second-order
counts. Stage 2 rebuilds the compatibility matrices from raw coordinates
restricted to that subset (where the inlier rate is higher, so the measure
is even more discriminative) and keeps the strongest partners again. The
seed itself is always retained; outlier seeds are not filtered here, their
hypotheses are left for final selection to reject.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .compat import (
    distance_difference_matrix,
    hard_compatibility,
    sc2_matrix,
    soft_compatibility,
    soft_sc2,
)
from .geometry import CorrespondenceSet


class DegenerateConsensusError(ValueError):
    """A stage-1 set too small to constrain a rigid transform."""


class ConsensusSet(NamedTuple):
    seed: int
    members: np.ndarray  # global correspondence indices, seed first
    local_soft_sc2: np.ndarray  # (k2, k2), aligned with ``members``


def _top_neighbors(scores: np.ndarray, tie_ids: np.ndarray, self_pos: int, k: int) -> np.ndarray:
    """Positions of the k largest scores excluding ``self_pos``.

    Descending score; ties broken by ascending ``tie_ids`` (the global
    correspondence index, for determinism across subset orderings).
    """
    order = np.lexsort((tie_ids, -scores))
    order = order[order != self_pos]
    return order[:k]


def stage1_select_by_scores(scores: np.ndarray, seed: int, k1: int) -> np.ndarray:
    """Seed plus the k1 indices with the largest ``scores`` (ties by index)."""
    if k1 < 1:
        raise ValueError("k1 must be >= 1")
    n = len(scores)
    k1 = min(k1, n - 1)
    neighbors = _top_neighbors(scores, np.arange(n), seed, k1)
    return np.concatenate(([seed], neighbors))


def stage1_select(sc2: np.ndarray, seed: int, k1: int) -> np.ndarray:
    """Seed plus its top-k1 neighbors in the global second-order counts."""
    return stage1_select_by_scores(sc2[seed], seed, k1)


def stage2_refine(
    corrs: CorrespondenceSet,
    stage1: np.ndarray,
    seed: int,
    d_thr: float,
    k2: int,
) -> ConsensusSet:
    """Refine a stage-1 set by its own locally rebuilt second-order counts.

    Returns the seed plus its top (k2-1) local neighbors, together with the
    soft second-order matrix over those final members (the input to the
    local spectral weighting). Membership is capped at the stage-1 size.
    """
    stage1 = np.asarray(stage1, dtype=np.int64)
    if len(stage1) < 3:
        raise DegenerateConsensusError(
            f"stage-1 set of size {len(stage1)} cannot support a hypothesis"
        )
    if seed not in stage1:
        raise ValueError("seed must be a member of its stage-1 set")
    if k2 < 1:
        raise ValueError("k2 must be >= 1")
    k2 = min(k2, len(stage1))

    local = corrs.subset(stage1)
    dist_diff = distance_difference_matrix(local)
    counts = sc2_matrix(hard_compatibility(dist_diff, d_thr))

    seed_pos = int(np.nonzero(stage1 == seed)[0][0])
    neighbor_pos = _top_neighbors(counts[seed_pos], stage1, seed_pos, k2 - 1)
    member_pos = np.concatenate(([seed_pos], neighbor_pos))
    members = stage1[member_pos]

    if len(members) < 2:
        return ConsensusSet(seed=int(seed), members=members, local_soft_sc2=np.zeros((1, 1)))
    final = corrs.subset(members)
    soft = soft_compatibility(distance_difference_matrix(final), d_thr)
    return ConsensusSet(seed=int(seed), members=members, local_soft_sc2=soft_sc2(soft))
