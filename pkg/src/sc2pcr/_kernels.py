"""Compiled inner loops shared by the compatibility and solver modules.

All kernels are deterministic for any thread count: every output element is
produced by exactly one thread, and every floating-point reduction runs
left-to-right over a fixed index order. Integer kernels are trivially exact.
"""

from __future__ import annotations

import math

import numba
import numpy as np
from numba import njit, prange

# OpenMP is always present here; selecting it up front skips the TBB probe
# (and its version warning) during pool startup.
numba.config.THREADING_LAYER = "omp"

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)


def set_thread_count(requested) -> int:
    """Clamp ``requested`` to the launched numba pool and apply it.

    Returns the thread count actually in effect. ``None`` leaves the current
    setting untouched.
    """
    if requested is None:
        return numba.get_num_threads()
    limit = numba.config.NUMBA_NUM_THREADS
    threads = max(1, min(int(requested), limit))
    numba.set_num_threads(threads)
    return threads


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def _testbit(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & _ONE


@njit(cache=True, inline="always")
def _sc2_fill_row(packed, out, i, n, w):
    row_i = packed[i]
    for j in range(i + 1, n):
        if _testbit(row_i, j):
            row_j = packed[j]
            s = np.int64(0)
            for k in range(w):
                s += _popcount64(row_i[k] & row_j[k])
            out[i, j] = s
            out[j, i] = s


@njit(cache=True, parallel=True)
def sc2_from_packed(packed, n):
    """Hadamard of C with C @ C from bit-packed rows of a symmetric C.

    Only pairs with C[i, j] = 1 are evaluated; everything else stays 0.
    Rows h and n-1-h are folded into one parallel iteration so the triangular
    loop stays load-balanced.
    """
    w = packed.shape[1]
    out = np.zeros((n, n), dtype=np.int32)
    half = (n + 1) // 2
    for h in prange(half):
        _sc2_fill_row(packed, out, h, n, w)
        m = n - 1 - h
        if m != h:
            _sc2_fill_row(packed, out, m, n, w)
    return out


@njit(cache=True)
def sc2_single_row(packed, i, n):
    """One row of the second-order count matrix, without materializing it."""
    w = packed.shape[1]
    out = np.zeros(n, dtype=np.int32)
    row_i = packed[i]
    for j in range(n):
        if j != i and _testbit(row_i, j):
            row_j = packed[j]
            s = np.int64(0)
            for k in range(w):
                s += _popcount64(row_i[k] & row_j[k])
            out[j] = s
    return out


@njit(cache=True, inline="always")
def _soft_fill_row(ct, out, i, n):
    for j in range(i + 1, n):
        cij = ct[i, j]
        if cij > 0.0:
            s = 0.0
            for k in range(n):
                s += ct[i, k] * ct[j, k]
            v = cij * s
            out[i, j] = v
            out[j, i] = v


@njit(cache=True, parallel=True)
def soft_sc2_product(ct):
    """Hadamard of a symmetric soft matrix with its own square.

    The k-sum runs left-to-right per (i, j) entry, so results are identical
    for any thread count.
    """
    n = ct.shape[0]
    out = np.zeros((n, n))
    half = (n + 1) // 2
    for h in prange(half):
        _soft_fill_row(ct, out, h, n)
        m = n - 1 - h
        if m != h:
            _soft_fill_row(ct, out, m, n)
    return out


@njit(cache=True, parallel=True)
def sym_matvec(m, v):
    """Row-parallel matrix-vector product with fixed intra-row order."""
    n = m.shape[0]
    out = np.empty(n)
    for i in prange(n):
        s = 0.0
        for j in range(n):
            s += m[i, j] * v[j]
        out[i] = s
    return out


@njit(cache=True, inline="always")
def _residual(r, t, src, tgt, i):
    px = r[0, 0] * src[i, 0] + r[0, 1] * src[i, 1] + r[0, 2] * src[i, 2] + t[0] - tgt[i, 0]
    py = r[1, 0] * src[i, 0] + r[1, 1] * src[i, 1] + r[1, 2] * src[i, 2] + t[1] - tgt[i, 1]
    pz = r[2, 0] * src[i, 0] + r[2, 1] * src[i, 1] + r[2, 2] * src[i, 2] + t[2] - tgt[i, 2]
    return math.sqrt(px * px + py * py + pz * pz)


@njit(cache=True, parallel=True)
def batch_inlier_counts(rotations, translations, src, tgt, tau):
    """Strict-inequality inlier counts and inlier residual sums per transform."""
    h = rotations.shape[0]
    n = src.shape[0]
    counts = np.zeros(h, dtype=np.int64)
    res_sums = np.zeros(h)
    for a in prange(h):
        r = rotations[a]
        t = translations[a]
        c = 0
        s = 0.0
        for i in range(n):
            d = _residual(r, t, src, tgt, i)
            if d < tau:
                c += 1
                s += d
        counts[a] = c
        res_sums[a] = s
    return counts, res_sums


@njit(cache=True)
def inlier_mask_single(rotation, translation, src, tgt, tau):
    """Inlier mask, count and residual sum for one transform.

    Uses the same arithmetic as :func:`batch_inlier_counts` so masks always
    agree with batched counts bit-for-bit.
    """
    n = src.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    c = 0
    s = 0.0
    for i in range(n):
        d = _residual(rotation, translation, src, tgt, i)
        if d < tau:
            mask[i] = True
            c += 1
            s += d
    return mask, c, s
