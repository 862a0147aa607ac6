"""Command-line interface: a thin client over the registration service.

Exit codes: 0 success, 1 usage error (bad flags, unreadable files),
2 degenerate-input error (valid request the engine cannot satisfy).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .client import ServiceClient, ServiceError
from .io import (
    read_correspondences,
    read_transform_json,
    transform_to_dict,
    write_correspondences,
    write_transform_json,
)

_server_option = click.option(
    "--server", default=None, help="Base URL of a running service; default is in-process."
)
_threads_option = click.option(
    "--threads", type=int, default=None, help="Worker threads (fallback: SC2_THREADS)."
)


def _resolve_threads(threads):
    if threads is not None:
        return threads
    env = os.environ.get("SC2_THREADS")
    return int(env) if env else None


@click.group()
def cli():
    """Rigid point-cloud registration from putative correspondences."""


@cli.command()
@click.option("--corrs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gt", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_threads_option
@_server_option
def register(corrs, gt, config_path, out, threads, server):
    """Estimate the rigid transform aligning a correspondence file."""
    corr_set = read_correspondences(corrs)
    payload = {
        "source": corr_set.source.tolist(),
        "target": corr_set.target.tolist(),
    }
    if config_path:
        payload["config"] = json.loads(Path(config_path).read_text(encoding="utf-8"))
    threads = _resolve_threads(threads)
    if threads is not None:
        payload["threads"] = threads
    if gt:
        gt_transform, gt_indices = read_transform_json(gt)
        payload["ground_truth"] = {
            "rotation": [float(x) for x in gt_transform.rotation.ravel()],
            "translation": [float(x) for x in gt_transform.translation],
            "inlier_indices": None if gt_indices is None else [int(i) for i in gt_indices],
        }

    response = ServiceClient(server).post("/register", payload)

    click.echo(f"correspondences: {corr_set.n}")
    click.echo(f"inliers: {response['inlier_count']}  (seed {response['seed_used']}, "
               f"{response['hypotheses_evaluated']} hypotheses)")
    click.echo(f"time: {response['timings'].get('total', 0.0):.3f}s")
    metrics = response.get("metrics")
    if metrics:
        line = f"vs ground truth: RE {metrics['re_deg']:.4f} deg, TE {metrics['te_m']:.4f} m"
        if metrics.get("f1") is not None:
            line += (f", IP {metrics['precision']:.3f}, IR {metrics['recall']:.3f}, "
                     f"F1 {metrics['f1']:.3f}")
        click.echo(line)
    if out:
        write_transform_json(out, {
            "rotation": response["rotation"],
            "translation": response["translation"],
            "inlier_count": response["inlier_count"],
            "inlier_indices": response["inlier_indices"],
            "config": response["config"],
        })
        click.echo(f"wrote {out}")


@cli.command()
@click.option("--n", required=True, type=int)
@click.option("--inlier-ratio", required=True, type=float)
@click.option("--noise", required=True, type=float, help="Inlier noise sigma, meters.")
@click.option("--box", required=True, type=float, help="Scene box extent, meters.")
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--gt-out", type=click.Path(dir_okay=False), default=None,
              help="Ground-truth JSON path (default: OUT.gt.json).")
@click.option("--format", "fmt", type=click.Choice(["text", "binary"]), default=None,
              help="Correspondence format (default: binary for .bin, else text).")
@_server_option
def synth(n, inlier_ratio, noise, box, seed, out, gt_out, fmt, server):
    """Generate a synthetic scene with known ground truth."""
    response = ServiceClient(server).post("/synth", {
        "n": n,
        "inlier_ratio": inlier_ratio,
        "noise_sigma": noise,
        "box_extent": box,
        "seed": seed,
    })
    from .geometry import CorrespondenceSet, RigidTransform
    import numpy as np

    corr_set = CorrespondenceSet(np.asarray(response["source"]), np.asarray(response["target"]))
    write_correspondences(out, corr_set, fmt=fmt)
    gt = response["ground_truth"]
    gt_path = gt_out or f"{out}.gt.json"
    write_transform_json(gt_path, transform_to_dict(
        RigidTransform(np.asarray(gt["rotation"]).reshape(3, 3), np.asarray(gt["translation"])),
        inlier_count=len(gt["inlier_indices"]),
        inlier_indices=gt["inlier_indices"],
        config=response["params"],
    ))
    click.echo(f"wrote {out} ({corr_set.n} pairs) and {gt_path}")


@cli.command()
@click.option("--n", required=True, type=int)
@click.option("--alpha", required=True, type=float)
@click.option("--p", required=True, type=float)
@click.option("--trials", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_server_option
def ambiguity(n, alpha, p, trials, seed, server):
    """Analytic ambiguity probabilities next to their Monte Carlo estimates."""
    response = ServiceClient(server).post("/ambiguity", {
        "n": n, "alpha": alpha, "p": p, "trials": trials, "seed": seed,
    })
    mc1 = response["mc_first_order"]
    mc2 = response["mc_second_order"]
    click.echo(f"first-order  analytic {response['first_order']:.6f}   "
               f"mc {mc1['estimate']:.6f} +/- {mc1['std_error']:.6f}")
    click.echo(f"second-order analytic {response['second_order']:.6f}   "
               f"mc {mc2['estimate']:.6f} +/- {mc2['std_error']:.6f}")
    if not response["threshold_is_integral"]:
        click.echo(f"note: n*alpha-2 is not integral; floor/ceil rounding gives "
                   f"{response['second_order_floor']:.6f} / {response['second_order_ceil']:.6f}")


@cli.command()
@click.option("--suite", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Suite definition JSON.")
@click.option("--out-csv", required=True, type=click.Path(dir_okay=False))
@_threads_option
@_server_option
def bench(suite, out_csv, threads, server):
    """Run a synthetic benchmark suite and write per-trial CSV rows."""
    payload = json.loads(Path(suite).read_text(encoding="utf-8"))
    threads = _resolve_threads(threads)
    if threads is not None:
        payload["threads"] = threads
    response = ServiceClient(server).post("/bench", payload)
    Path(out_csv).write_text(response["csv"], encoding="utf-8", newline="\n")
    click.echo(f"{'method':<10} {'ratio':>6} {'recall':>7} {'RE(deg)':>8} {'TE(m)':>8} {'time(s)':>8}")
    for row in response["summaries"]:
        re_mean = row["re_mean_deg"]
        te_mean = row["te_mean_m"]
        click.echo(f"{row['method']:<10} {row['inlier_ratio']:>6.3f} {row['recall_fraction']:>7.3f} "
                   f"{re_mean if re_mean is None else round(re_mean, 4)!s:>8} "
                   f"{te_mean if te_mean is None else round(te_mean, 4)!s:>8} "
                   f"{row['wall_clock_total_s']:>8.2f}")
    click.echo(f"wrote {out_csv}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8421, show_default=True)
def serve(host, port):
    """Run the registration service."""
    import uvicorn

    uvicorn.run("sc2pcr.service.app:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ServiceError as exc:
        click.echo(f"error: {exc.detail}", err=True)
        return 2 if exc.status_code == 400 else 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
