"""Pydantic request/response models for the registration service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class ConfigModel(BaseModel):
    """Mirrors RegistrationConfig; unset fields take the engine defaults."""

    model_config = ConfigDict(extra="forbid")

    d_thr: float = 0.1
    tau: float | None = None
    seed_ratio: float = 0.2
    nms_radius: float | None = None
    k1: int = 30
    k2: int = 20
    power_iters: int = 40
    power_tol: float = 1e-6


class TransformModel(BaseModel):
    rotation: list[float] = Field(min_length=9, max_length=9, description="row-major 3x3")
    translation: list[float] = Field(min_length=3, max_length=3)


class GroundTruthModel(TransformModel):
    inlier_indices: list[int] | None = None


class RegisterRequest(BaseModel):
    source: list[list[float]] = Field(description="N x 3 source points, meters")
    target: list[list[float]] = Field(description="N x 3 matched target points")
    config: ConfigModel | None = None
    threads: int | None = None
    ground_truth: GroundTruthModel | None = None


class MetricsModel(BaseModel):
    re_deg: float
    te_m: float
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None


class RegisterResponse(BaseModel):
    rotation: list[float]
    translation: list[float]
    inlier_count: int
    inlier_indices: list[int]
    seed_used: int
    hypotheses_evaluated: int
    timings: dict[str, float]
    config: dict
    metrics: MetricsModel | None = None


class SynthRequest(BaseModel):
    n: int = 1000
    inlier_ratio: float = 0.05
    noise_sigma: float = 0.01
    box_extent: float = 10.0
    seed: int = 0


class SynthResponse(BaseModel):
    source: list[list[float]]
    target: list[list[float]]
    ground_truth: GroundTruthModel
    params: dict


class AmbiguityRequest(BaseModel):
    n: int = 1000
    alpha: float = 0.05
    p: float = 0.2
    trials: int = 100000
    seed: int = 0


class McModel(BaseModel):
    estimate: float
    std_error: float


class AmbiguityResponse(BaseModel):
    first_order: float
    second_order: float
    second_order_floor: float
    second_order_ceil: float
    threshold_is_integral: bool
    mc_first_order: McModel
    mc_second_order: McModel


class BenchRequest(BaseModel):
    seed: int = 0
    trials: int = 20
    n: int = 1000
    noise_sigma: float = 0.01
    box_extent: float = 10.0
    inlier_ratios: list[float] = [0.008, 0.015, 0.03, 0.05, 0.08, 0.12]
    methods: list[str] = ["sc2", "ransac", "sc_guided"]
    ransac_iterations: int = 1000
    re_thresh_deg: float = 5.0
    te_thresh_m: float = 0.30
    config: ConfigModel | None = None
    threads: int | None = None


class BucketSummary(BaseModel):
    method: str
    inlier_ratio: float
    recall_fraction: float
    re_mean_deg: float | None
    te_mean_m: float | None
    precision: float
    recall: float
    f1: float
    wall_clock_total_s: float


class BenchResponse(BaseModel):
    summaries: list[BucketSummary]
    csv: str
