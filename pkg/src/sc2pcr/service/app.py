"""FastAPI service wrapping the registration engine.

Every endpoint is stateless: requests carry all inputs (correspondences are
inline arrays, not file paths), responses carry all outputs. Domain errors
(degenerate geometry, impossible models) map to HTTP 400; malformed payloads
are FastAPI's usual 422.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import theory
from ..bench import BenchSuite, run_bench
from ..geometry import CorrespondenceSet, RigidTransform
from ..metrics import inlier_prf, rotation_error, translation_error
from ..pipeline import NoViableHypothesisError, RegistrationConfig, register
from ..solver import DegenerateGeometryError
from ..synthetic import SceneParams, generate_scene
from .schemas import (
    AmbiguityRequest,
    AmbiguityResponse,
    BenchRequest,
    BenchResponse,
    BucketSummary,
    GroundTruthModel,
    McModel,
    MetricsModel,
    RegisterRequest,
    RegisterResponse,
    SynthRequest,
    SynthResponse,
)

_DOMAIN_ERRORS = (ValueError, DegenerateGeometryError, NoViableHypothesisError)


def _config_from(model) -> RegistrationConfig:
    if model is None:
        return RegistrationConfig()
    return RegistrationConfig.from_dict(model.model_dump(exclude_none=True))


def _points(rows, name: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise HTTPException(status_code=400, detail=f"{name} must be an N x 3 array")
    return arr


def create_app() -> FastAPI:
    app = FastAPI(
        title="sc2pcr",
        description="Rigid point-cloud registration from putative correspondences",
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/register", response_model=RegisterResponse)
    def register_endpoint(req: RegisterRequest):
        source = _points(req.source, "source")
        target = _points(req.target, "target")
        try:
            corrs = CorrespondenceSet(source, target)
            cfg = _config_from(req.config)
            result = register(corrs, cfg, threads=req.threads)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        metrics = None
        if req.ground_truth is not None:
            gt = req.ground_truth
            try:
                gt_transform = RigidTransform(
                    np.asarray(gt.rotation).reshape(3, 3), np.asarray(gt.translation)
                )
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=f"ground_truth: {exc}")
            metrics = MetricsModel(
                re_deg=rotation_error(result.transform.rotation, gt_transform.rotation),
                te_m=translation_error(result.transform.translation, gt_transform.translation),
            )
            if gt.inlier_indices is not None:
                gt_mask = np.zeros(corrs.n, dtype=bool)
                gt_mask[np.asarray(gt.inlier_indices, dtype=np.int64)] = True
                prf = inlier_prf(result.inlier_mask, gt_mask)
                metrics.precision = prf.precision
                metrics.recall = prf.recall
                metrics.f1 = prf.f1

        return RegisterResponse(
            rotation=[float(x) for x in result.transform.rotation.ravel()],
            translation=[float(x) for x in result.transform.translation],
            inlier_count=result.inlier_count,
            inlier_indices=[int(i) for i in np.nonzero(result.inlier_mask)[0]],
            seed_used=result.seed_used,
            hypotheses_evaluated=result.hypotheses_evaluated,
            timings=result.timings,
            config=cfg.to_dict(),
            metrics=metrics,
        )

    @app.post("/synth", response_model=SynthResponse)
    def synth_endpoint(req: SynthRequest):
        try:
            scene = generate_scene(
                SceneParams(
                    n=req.n,
                    inlier_ratio=req.inlier_ratio,
                    noise_sigma=req.noise_sigma,
                    box_extent=req.box_extent,
                    seed=req.seed,
                )
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return SynthResponse(
            source=scene.corrs.source.tolist(),
            target=scene.corrs.target.tolist(),
            ground_truth=GroundTruthModel(
                rotation=[float(x) for x in scene.gt_transform.rotation.ravel()],
                translation=[float(x) for x in scene.gt_transform.translation],
                inlier_indices=[int(i) for i in np.nonzero(scene.gt_inliers)[0]],
            ),
            params={
                "n": req.n,
                "inlier_ratio": req.inlier_ratio,
                "noise_sigma": req.noise_sigma,
                "box_extent": req.box_extent,
                "seed": req.seed,
            },
        )

    @app.post("/ambiguity", response_model=AmbiguityResponse)
    def ambiguity_endpoint(req: AmbiguityRequest):
        try:
            model = theory.AmbiguityModel(n=req.n, alpha=req.alpha, p=req.p)
            floor_v, round_v, ceil_v = theory.sc2_ambiguity_sensitivity(model)
            mc_sc = theory.mc_ambiguity_sc(req.p, req.trials, seed=req.seed)
            mc_sc2 = theory.mc_ambiguity_sc2(model, req.trials, seed=req.seed)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        threshold = req.n * req.alpha - 2.0
        return AmbiguityResponse(
            first_order=theory.sc_ambiguity(req.p),
            second_order=round_v,
            second_order_floor=floor_v,
            second_order_ceil=ceil_v,
            threshold_is_integral=math.isclose(threshold, round(threshold), abs_tol=1e-12),
            mc_first_order=McModel(estimate=mc_sc.estimate, std_error=mc_sc.std_error),
            mc_second_order=McModel(estimate=mc_sc2.estimate, std_error=mc_sc2.std_error),
        )

    @app.post("/bench", response_model=BenchResponse)
    def bench_endpoint(req: BenchRequest):
        payload = req.model_dump(exclude_none=True)
        threads = payload.pop("threads", None)
        try:
            suite = BenchSuite.from_dict(payload)
            reports, csv_text = run_bench(suite, threads=threads)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        summaries = [
            BucketSummary(
                method=method,
                inlier_ratio=ratio,
                recall_fraction=report.recall_fraction,
                re_mean_deg=None if math.isnan(report.re_mean_deg) else report.re_mean_deg,
                te_mean_m=None if math.isnan(report.te_mean_m) else report.te_mean_m,
                precision=report.precision,
                recall=report.recall,
                f1=report.f1,
                wall_clock_total_s=report.wall_clock_total_s,
            )
            for (method, ratio), report in reports.items()
        ]
        return BenchResponse(summaries=summaries, csv=csv_text)

    return app


app = create_app()
