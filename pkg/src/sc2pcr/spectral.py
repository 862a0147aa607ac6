"""Leading-eigenvector confidences, seed selection, and local weights.

The association of each correspondence with the leading eigenvector of the
soft second-order matrix serves as its confidence. Seeds are confidences
that survive spatial non-maximum suppression; the same eigenvector machinery
applied to a consensus set's local matrix yields per-correspondence weights
for the weighted alignment solve.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .geometry import CorrespondenceSet

# np.dot is cheaper than a kernel launch below this size.
_MATVEC_KERNEL_MIN_N = 256


class ConfidenceVector(NamedTuple):
    """Unit-norm non-negative scores; ``degenerate`` marks an all-equal fallback."""

    scores: np.ndarray
    degenerate: bool


class SeedSet(NamedTuple):
    indices: np.ndarray
    scores: np.ndarray
    degenerate: bool


def _uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / math.sqrt(n))


def leading_eigenvector(matrix: np.ndarray, max_iters: int = 40, tol: float = 1e-6) -> ConfidenceVector:
    """Principal eigenvector of a symmetric non-negative matrix by power iteration.

    Starts from the all-ones direction (never orthogonal to the principal
    eigenvector of a non-negative matrix) and stops once the max-norm change
    between normalized iterates drops below ``tol``. A zero matrix yields the
    uniform vector flagged as degenerate, so callers treat all confidences
    as equal.
    """
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    n = m.shape[0]
    if n == 0 or m.shape != (n, n):
        raise ValueError(f"expected square matrix, got shape {m.shape}")
    if not m.any():
        return ConfidenceVector(_uniform(n), degenerate=True)

    use_kernel = n >= _MATVEC_KERNEL_MIN_N
    v = _uniform(n)
    for _ in range(max_iters):
        w = _kernels.sym_matvec(m, v) if use_kernel else m @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return ConfidenceVector(_uniform(n), degenerate=True)
        w /= norm
        converged = np.max(np.abs(w - v)) < tol
        v = w
        if converged:
            break
    return ConfidenceVector(v, degenerate=False)


def select_seeds(
    conf: ConfidenceVector,
    corrs: CorrespondenceSet,
    nms_radius: float,
    seed_ratio: float,
) -> SeedSet:
    """Spatially non-maximum-suppressed top-confidence correspondences.

    A correspondence survives if no other one within ``nms_radius`` of its
    source point has strictly higher confidence (an equal-confidence
    neighborhood keeps all its members). Survivors are ranked by descending
    confidence, ties by ascending index, and truncated to
    ``ceil(seed_ratio * n)``.
    """
    if not 0.0 < seed_ratio <= 1.0:
        raise ValueError("seed_ratio must be in (0, 1]")
    if nms_radius < 0:
        raise ValueError("nms_radius must be non-negative")
    scores = conf.scores
    n = corrs.n
    if scores.shape != (n,):
        raise ValueError("confidence length does not match correspondence count")

    suppressed = np.zeros(n, dtype=bool)
    if n > 1:
        pairs = cKDTree(corrs.source).query_pairs(r=nms_radius, output_type="ndarray")
        if len(pairs):
            si, sj = scores[pairs[:, 0]], scores[pairs[:, 1]]
            suppressed[pairs[sj > si, 0]] = True
            suppressed[pairs[si > sj, 1]] = True

    survivors = np.nonzero(~suppressed)[0]
    order = np.lexsort((survivors, -scores[survivors]))
    keep = min(len(survivors), math.ceil(seed_ratio * n))
    chosen = survivors[order[:keep]]
    return SeedSet(indices=chosen, scores=scores[chosen], degenerate=conf.degenerate)


def spectral_weights(local_soft_sc2: np.ndarray, max_iters: int = 40, tol: float = 1e-6) -> ConfidenceVector:
    """Per-member weights for the weighted SVD: local leading eigenvector."""
    return leading_eigenvector(local_soft_sc2, max_iters=max_iters, tol=tol)
