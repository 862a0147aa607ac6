"""First- and second-order spatial compatibility matrices.

Rigid motion preserves pairwise distances, so for two correct matches the
difference between the source-side and target-side distances is small. The
matrices built here quantify that:

* ``distance_difference_matrix`` - |d(x_i, x_j) - d(y_i, y_j)| for all pairs.
* ``hard_compatibility`` - binary thresholding at ``d_thr``, bit-packed.
* ``sc2_matrix`` - for each compatible pair, how many other correspondences
  are compatible with both (the second-order measure).
* ``soft_compatibility`` / ``soft_sc2`` - the real-valued analogues used for
  spectral analysis.

The binary product is the O(N^3) hot spot at N ~ 5000; rows are packed into
64-bit words so the common-neighbor count of a pair is a popcount of ANDed
rows, which is exact and ~64x faster than a scalar loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from . import _kernels
from .geometry import CorrespondenceSet


@dataclass(frozen=True)
class HardCompat:
    """Symmetric binary compatibility matrix with rows packed into uint64."""

    packed: np.ndarray  # (n, w) uint64, bit j of row i = C[i, j]
    n: int
    d_thr: float

    def to_dense(self) -> np.ndarray:
        """Unpack to an (n, n) boolean matrix."""
        bytes_view = self.packed.view(np.uint8)[:, : (self.n + 7) // 8]
        bits = np.unpackbits(bytes_view, axis=1, bitorder="little")[:, : self.n]
        return bits.astype(bool)

    def degrees(self) -> np.ndarray:
        """Row sums of C (number of compatible partners per correspondence)."""
        return self.to_dense().sum(axis=1)


def pack_bool_rows(mask: np.ndarray) -> np.ndarray:
    """Pack boolean matrix rows into little-endian uint64 words."""
    mask = np.ascontiguousarray(mask, dtype=bool)
    n = mask.shape[1]
    packed8 = np.packbits(mask, axis=1, bitorder="little")
    width8 = ((n + 63) // 64) * 8
    if packed8.shape[1] < width8:
        pad = np.zeros((mask.shape[0], width8 - packed8.shape[1]), dtype=np.uint8)
        packed8 = np.hstack([packed8, pad])
    return np.ascontiguousarray(packed8).view(np.uint64)


def distance_difference_matrix(corrs: CorrespondenceSet) -> np.ndarray:
    """Pairwise |source distance - target distance|, shape (n, n).

    Symmetric, non-negative, zero diagonal. Requires n >= 2.
    """
    if corrs.n < 2:
        raise ValueError("need at least 2 correspondences to form pairs")
    d_src = cdist(corrs.source, corrs.source)
    d_tgt = cdist(corrs.target, corrs.target)
    np.subtract(d_src, d_tgt, out=d_src)
    np.abs(d_src, out=d_src)
    return d_src


def hard_compatibility(dist_diff: np.ndarray, d_thr: float) -> HardCompat:
    """Threshold the distance differences into a packed binary matrix.

    The boundary is inclusive: a pair with difference exactly ``d_thr`` is
    compatible. The diagonal is forced to zero.
    """
    if d_thr <= 0:
        raise ValueError("d_thr must be positive")
    mask = dist_diff <= d_thr
    np.fill_diagonal(mask, False)
    return HardCompat(packed=pack_bool_rows(mask), n=mask.shape[0], d_thr=float(d_thr))


def sc2_matrix(compat: HardCompat) -> np.ndarray:
    """Second-order counts: C[i,j] * sum_k C[i,k] C[k,j], as int32 (n, n)."""
    return _kernels.sc2_from_packed(compat.packed, compat.n)


def sc2_row(compat: HardCompat, i: int) -> np.ndarray:
    """One row of the second-order count matrix (streaming path)."""
    if not 0 <= i < compat.n:
        raise IndexError(f"row {i} out of range for n={compat.n}")
    return _kernels.sc2_single_row(compat.packed, i, compat.n)


def sc2_topk_rows(compat: HardCompat, k: int):
    """Per-row top-k neighbors by second-order count, row by row.

    Never materializes the full count matrix, so it stays usable beyond the
    dense-memory scale (n > 8000). Ties are broken by ascending index.
    Returns ``(indices, counts)`` of shape (n, k_eff) with k_eff = min(k, n-1).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = compat.n
    k_eff = min(k, n - 1)
    indices = np.empty((n, k_eff), dtype=np.int64)
    counts = np.empty((n, k_eff), dtype=np.int32)
    for i in range(n):
        row = _kernels.sc2_single_row(compat.packed, i, n)
        row[i] = -1  # self is never a neighbor
        order = np.argsort(-row, kind="stable")[:k_eff]
        indices[i] = order
        counts[i] = row[order]
    return indices, counts


def soft_compatibility(dist_diff: np.ndarray, d_thr: float, out=None) -> np.ndarray:
    """Quadratic falloff max(0, 1 - (d/d_thr)^2), zero diagonal.

    ``out`` may alias ``dist_diff`` to reuse its buffer at large n.
    """
    if d_thr <= 0:
        raise ValueError("d_thr must be positive")
    soft = np.divide(dist_diff, d_thr, out=out)
    np.square(soft, out=soft)
    np.subtract(1.0, soft, out=soft)
    np.maximum(soft, 0.0, out=soft)
    np.fill_diagonal(soft, 0.0)
    return soft


def soft_sc2(soft_compat: np.ndarray) -> np.ndarray:
    """Soft second-order matrix, max-normalized into [0, 1].

    Computes the Hadamard product of the soft matrix with its own square and
    rescales by the maximum entry (when positive), which leaves the leading
    eigenvector direction unchanged.
    """
    out = _kernels.soft_sc2_product(np.ascontiguousarray(soft_compat, dtype=np.float64))
    peak = out.max() if out.size else 0.0
    if peak > 0.0:
        out /= peak
    return out
