import json
import subprocess
import sys

import numpy as np

from sc2pcr.cli import main
from sc2pcr.io import read_correspondences, read_transform_json, write_correspondences
from sc2pcr.synthetic import SceneParams, generate_scene


def write_scene_files(tmp_path, seed=170, n=120, ratio=0.2, fmt="text"):
    scene = generate_scene(SceneParams(n=n, inlier_ratio=ratio, noise_sigma=0.01,
                                       box_extent=8.0, seed=seed))
    corr_path = tmp_path / ("pairs.bin" if fmt == "binary" else "pairs.txt")
    write_correspondences(corr_path, scene.corrs, fmt=fmt)
    gt_path = tmp_path / "gt.json"
    gt_path.write_text(json.dumps({
        "rotation": [float(x) for x in scene.gt_transform.rotation.ravel()],
        "translation": [float(x) for x in scene.gt_transform.translation],
        "inlier_count": int(scene.gt_inliers.sum()),
        "inlier_indices": [int(i) for i in np.nonzero(scene.gt_inliers)[0]],
        "config": {},
    }), encoding="utf-8")
    return scene, corr_path, gt_path


class TestRegisterCommand:
    def test_happy_path(self, tmp_path, capsys):
        scene, corr_path, gt_path = write_scene_files(tmp_path)
        out_path = tmp_path / "result.json"
        code = main(["register", "--corrs", str(corr_path), "--gt", str(gt_path),
                     "--out", str(out_path)])
        assert code == 0
        captured = capsys.readouterr()
        assert "vs ground truth" in captured.out
        transform, indices = read_transform_json(out_path)
        assert len(indices) == int(scene.gt_inliers.sum())
        payload = json.loads(out_path.read_text(encoding="utf-8"))
        assert set(payload) == {"rotation", "translation", "inlier_count",
                                "inlier_indices", "config"}

    def test_binary_input(self, tmp_path):
        scene, corr_path, _ = write_scene_files(tmp_path, fmt="binary")
        out_path = tmp_path / "result.json"
        assert main(["register", "--corrs", str(corr_path), "--out", str(out_path)]) == 0
        assert out_path.exists()

    def test_config_file_applies(self, tmp_path, capsys):
        _, corr_path, _ = write_scene_files(tmp_path, seed=171)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"d_thr": 0.2}), encoding="utf-8")
        out_path = tmp_path / "result.json"
        code = main(["register", "--corrs", str(corr_path), "--config", str(cfg_path),
                     "--out", str(out_path)])
        assert code == 0
        payload = json.loads(out_path.read_text(encoding="utf-8"))
        assert payload["config"]["d_thr"] == 0.2

    def test_missing_file_is_usage_error(self, tmp_path):
        assert main(["register", "--corrs", str(tmp_path / "nope.txt")]) == 1

    def test_missing_required_flag_is_usage_error(self):
        assert main(["register"]) == 1

    def test_degenerate_input_is_exit_2(self, tmp_path):
        corr_path = tmp_path / "two.txt"
        corr_path.write_text("0 0 0 0 0 0\n1 0 0 1 0 0\n", encoding="utf-8")
        assert main(["register", "--corrs", str(corr_path)]) == 2

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        # a config typo is a usage problem, not a degenerate input
        _, corr_path, _ = write_scene_files(tmp_path, seed=172)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"dthr": 0.2}), encoding="utf-8")
        assert main(["register", "--corrs", str(corr_path),
                     "--config", str(cfg_path)]) == 1


class TestSynthCommand:
    def test_writes_scene_and_gt(self, tmp_path):
        out = tmp_path / "scene.txt"
        code = main(["synth", "--n", "80", "--inlier-ratio", "0.1", "--noise", "0.01",
                     "--box", "8.0", "--seed", "42", "--out", str(out)])
        assert code == 0
        corrs = read_correspondences(out)
        assert corrs.n == 80
        transform, indices = read_transform_json(tmp_path / "scene.txt.gt.json")
        assert len(indices) == 8

    def test_byte_identical_across_runs(self, tmp_path):
        paths = []
        for name in ("a.txt", "b.txt"):
            out = tmp_path / name
            assert main(["synth", "--n", "50", "--inlier-ratio", "0.2", "--noise", "0.01",
                         "--box", "5.0", "--seed", "7", "--out", str(out)]) == 0
            paths.append(out)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_binary_output(self, tmp_path):
        out = tmp_path / "scene.bin"
        assert main(["synth", "--n", "30", "--inlier-ratio", "0.5", "--noise", "0.0",
                     "--box", "5.0", "--seed", "1", "--out", str(out)]) == 0
        assert out.read_bytes()[:4] == b"SC2C"

    def test_invalid_params_exit_2(self, tmp_path):
        out = tmp_path / "scene.txt"
        assert main(["synth", "--n", "2", "--inlier-ratio", "0.5", "--noise", "0.01",
                     "--box", "5.0", "--seed", "1", "--out", str(out)]) == 2


class TestAmbiguityCommand:
    def test_prints_analytic_beside_mc(self, capsys):
        code = main(["ambiguity", "--n", "1000", "--alpha", "0.01", "--p", "0.2",
                     "--trials", "20000", "--seed", "3"])
        assert code == 0
        out = capsys.readouterr().out
        assert "first-order" in out
        assert "second-order" in out
        assert "+/-" in out

    def test_nonintegral_threshold_note(self, capsys):
        code = main(["ambiguity", "--n", "1000", "--alpha", "0.0105", "--p", "0.2",
                     "--trials", "1000"])
        assert code == 0
        assert "floor/ceil" in capsys.readouterr().out

    def test_infeasible_model_exit_2(self):
        assert main(["ambiguity", "--n", "100", "--alpha", "0.001", "--p", "0.2"]) == 2


class TestBenchCommand:
    def test_writes_csv(self, tmp_path, capsys):
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps({
            "seed": 4,
            "trials": 2,
            "n": 150,
            "inlier_ratios": [0.2],
            "methods": ["sc2"],
        }), encoding="utf-8")
        out_csv = tmp_path / "bench.csv"
        assert main(["bench", "--suite", str(suite), "--out-csv", str(out_csv)]) == 0
        lines = out_csv.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0].startswith("method,")
        assert len(lines) == 3

    def test_threads_do_not_change_output(self, tmp_path):
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps({
            "seed": 5, "trials": 2, "n": 120, "inlier_ratios": [0.25], "methods": ["sc2"],
        }), encoding="utf-8")
        outputs = []
        for threads, name in ((1, "a.csv"), (8, "b.csv")):
            out_csv = tmp_path / name
            assert main(["bench", "--suite", str(suite), "--out-csv", str(out_csv),
                         "--threads", str(threads)]) == 0
            outputs.append(out_csv.read_bytes())
        assert outputs[0] == outputs[1]

    def test_invalid_suite_exit_2(self, tmp_path):
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps({"trials": 0}), encoding="utf-8")
        assert main(["bench", "--suite", str(suite), "--out-csv",
                     str(tmp_path / "x.csv")]) == 2


class TestEnvThreads:
    def test_sc2_threads_fallback(self, tmp_path, monkeypatch):
        _, corr_path, _ = write_scene_files(tmp_path, seed=173)
        monkeypatch.setenv("SC2_THREADS", "1")
        assert main(["register", "--corrs", str(corr_path)]) == 0


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "sc2pcr", "--help"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert "register" in proc.stdout
        assert "ambiguity" in proc.stdout

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "sc2pcr", "register", "--no-such-flag"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 1
