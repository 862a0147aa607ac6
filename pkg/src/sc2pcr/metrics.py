"""Registration evaluation: rotation/translation errors, recall, inlier PRF.

Success thresholds follow the usual indoor (15 deg, 0.30 m) and outdoor
(5 deg, 0.60 m) conventions. Mean rotation and translation errors are only
meaningful over successful registrations; aggregation here enforces that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import ROTATION_TOL

INDOOR_THRESHOLDS = (15.0, 0.30)  # degrees, meters
OUTDOOR_THRESHOLDS = (5.0, 0.60)


def _check_rotation(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(3))) > ROTATION_TOL or abs(np.linalg.det(r) - 1.0) > ROTATION_TOL:
        raise ValueError("input is not a proper rotation")
    return r


def rotation_error(r_est, r_gt) -> float:
    """Isotropic (geodesic) rotation error in degrees."""
    r_est = _check_rotation(r_est)
    r_gt = _check_rotation(r_gt)
    cos_angle = (np.trace(r_gt.T @ r_est) - 1.0) / 2.0
    return math.degrees(math.acos(min(1.0, max(-1.0, cos_angle))))


def translation_error(t_est, t_gt) -> float:
    """L2 translation error in meters."""
    return float(np.linalg.norm(np.asarray(t_est, dtype=np.float64) - np.asarray(t_gt, dtype=np.float64)))


def registration_recall(re_deg, te_m, re_thresh: float, te_thresh: float) -> float:
    """Fraction of trials with RE <= re_thresh and TE <= te_thresh."""
    if re_thresh <= 0 or te_thresh <= 0:
        raise ValueError("thresholds must be positive")
    re_deg = np.asarray(re_deg, dtype=np.float64)
    te_m = np.asarray(te_m, dtype=np.float64)
    if re_deg.shape != te_m.shape or re_deg.size == 0:
        raise ValueError("need matching, non-empty error arrays")
    return float(np.mean((re_deg <= re_thresh) & (te_m <= te_thresh)))


class PrecisionRecall(NamedTuple):
    precision: float
    recall: float
    f1: float
    degenerate: bool  # a zero denominator was coerced to 0


def inlier_prf(pred: np.ndarray, gt: np.ndarray) -> PrecisionRecall:
    """Inlier precision / recall / F1 of a predicted mask against ground truth."""
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise ValueError("mask lengths differ")
    tp = int(np.sum(pred & gt))
    fp = int(np.sum(pred & ~gt))
    fn = int(np.sum(~pred & gt))
    degenerate = False
    if tp + fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0.0:
        return PrecisionRecall(precision, recall, 0.0, True)
    return PrecisionRecall(precision, recall, 2 * precision * recall / (precision + recall), degenerate)


@dataclass(frozen=True)
class TrialRow:
    """One registration trial, as written to the benchmark CSV."""

    method: str
    inlier_ratio: float
    trial: int
    re_deg: float
    te_m: float
    success: bool
    inlier_count: int
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    """Aggregate over trials; RE/TE means cover successful trials only."""

    recall_fraction: float
    re_mean_deg: float
    te_mean_m: float
    precision: float
    recall: float
    f1: float
    rows: list = field(default_factory=list)
    wall_clock_total_s: float = 0.0
    wall_clock_mean_s: float = 0.0


def aggregate(rows, wall_clock_total_s: float = 0.0) -> EvalReport:
    rows = list(rows)
    if not rows:
        raise ValueError("no trials to aggregate")
    success = np.array([r.success for r in rows])
    re = np.array([r.re_deg for r in rows])
    te = np.array([r.te_m for r in rows])
    return EvalReport(
        recall_fraction=float(success.mean()),
        re_mean_deg=float(re[success].mean()) if success.any() else float("nan"),
        te_mean_m=float(te[success].mean()) if success.any() else float("nan"),
        precision=float(np.mean([r.precision for r in rows])),
        recall=float(np.mean([r.recall for r in rows])),
        f1=float(np.mean([r.f1 for r in rows])),
        rows=rows,
        wall_clock_total_s=wall_clock_total_s,
        wall_clock_mean_s=wall_clock_total_s / len(rows),
    )
