"""CLI subcommands through click's test runner."""
import json
import math

import pytest
from click.testing import CliRunner

from kokonet.cli import main, parse_angle


@pytest.fixture()
def runner():
    return CliRunner()


class TestAngleParsing:
    def test_default_degrees(self):
        assert parse_angle("105") == pytest.approx(math.radians(105))

    def test_deg_suffix(self):
        assert parse_angle("105deg") == pytest.approx(math.radians(105))

    def test_rad_suffix(self):
        assert parse_angle("1.5rad") == pytest.approx(1.5)


class TestQsCommand:
    def test_qs_a_bundle(self, runner, tmp_path):
        out = str(tmp_path / "bundle.json")
        res = runner.invoke(main, ["qs", "--alpha", "105deg", "--beta", "15deg",
                                   "--gamma", "120deg", "--branch", "+",
                                   "--samples", "5", "--out", out])
        assert res.exit_code == 0, res.output
        data = json.loads(open(out).read())
        assert data["schema"] == "kokonet/flexion-bundle/1"
        assert len(data["samples"]) == 5
        assert '"verdict": true' in res.output

    def test_degenerate_seed_exit_2(self, runner, tmp_path):
        res = runner.invoke(main, ["qs", "--alpha", "90deg", "--beta", "90deg",
                                   "--gamma", "90deg",
                                   "--out", str(tmp_path / "x.json")])
        assert res.exit_code == 2
        assert "NotElliptic" in res.output

    def test_invalid_seed_exit_2(self, runner, tmp_path):
        res = runner.invoke(main, ["qs", "--alpha", "179deg", "--beta", "2deg",
                                   "--gamma", "2deg",
                                   "--out", str(tmp_path / "x.json")])
        assert res.exit_code == 2
        assert "InvalidSeed" in res.output

    def test_byte_stable_outputs(self, runner, tmp_path):
        # identical inputs produce identical bytes (golden-file contract)
        args = ["qs", "--alpha", "105deg", "--beta", "15deg", "--gamma", "120deg",
                "--samples", "4"]
        p1, p2 = str(tmp_path / "b1.json"), str(tmp_path / "b2.json")
        assert runner.invoke(main, args + ["--out", p1]).exit_code == 0
        assert runner.invoke(main, args + ["--out", p2]).exit_code == 0
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_obj_export(self, runner, tmp_path):
        objdir = tmp_path / "objs"
        res = runner.invoke(main, ["qs", "--alpha", "105deg", "--beta", "15deg",
                                   "--gamma", "120deg", "--samples", "3",
                                   "--out", str(tmp_path / "b.json"),
                                   "--obj-dir", str(objdir)])
        assert res.exit_code == 0, res.output
        assert len(list(objdir.glob("*.obj"))) == 3


def write_net_file(tmp_path, alphas, betas, gammas, deltas, unit="deg"):
    path = tmp_path / "net.json"
    path.write_text(json.dumps({
        "angles": {"alpha": alphas, "beta": betas, "gamma": gammas, "delta": deltas},
        "unit": unit,
    }))
    return str(path)


class TestClassifyCommand:
    def test_table_b_net(self, runner, tmp_path):
        path = write_net_file(
            tmp_path,
            [26.20, 16.16, 134.65, 117.95],
            [82.24, 130.87, 34.44, 49.52],
            [21.94, 18.85, 145.36, 149.02],
            [60.0, 115.0, 80.0, 105.0],
        )
        res = runner.invoke(main, ["classify", path, "--tol", "1e-3"])
        assert res.exit_code == 0, res.output
        report = json.loads(res.output)
        assert report["verdict"] is True
        assert abs(report["modulus"] - 1.22) < 1e-2

    def test_missing_file_exit_4(self, runner):
        res = runner.invoke(main, ["classify", "/nonexistent/net.json"])
        assert res.exit_code == 4


class TestFlexCommand:
    def test_trace_bundle(self, runner, tmp_path):
        # the all-right-angle central quad net with the closed-form flexion
        from paperdata import ORTHO90_COS, ORTHO90_T_RANGE

        alphas = [math.degrees(math.acos(c)) for c in ORTHO90_COS["alpha"]]
        betas = [math.degrees(math.acos(c)) for c in ORTHO90_COS["beta"]]
        gammas = [math.degrees(math.acos(c)) for c in ORTHO90_COS["gamma"]]
        path = write_net_file(tmp_path, alphas, betas, gammas, [90.0] * 4)
        lo, hi = ORTHO90_T_RANGE
        out = str(tmp_path / "flex.json")
        t0 = 0.5 * (lo + hi)
        theta1 = math.degrees(2 * math.atan2(1.0, t0))
        res = runner.invoke(main, ["flex", path, "--theta1", f"{theta1}deg",
                                   "--t-min", str(lo + 0.02), "--t-max", str(hi - 0.02),
                                   "--steps", "9", "--out", out])
        assert res.exit_code == 0, res.output
        data = json.loads(open(out).read())
        assert len(data["samples"]) == 9


class TestCheckCommand:
    def test_check_report(self, runner, tmp_path):
        bundle_path = str(tmp_path / "b.json")
        res = runner.invoke(main, ["qs", "--alpha", "105deg", "--beta", "15deg",
                                   "--gamma", "120deg", "--samples", "4",
                                   "--out", bundle_path])
        assert res.exit_code == 0
        res = runner.invoke(main, ["check", bundle_path])
        assert res.exit_code == 0, res.output
        report = json.loads(res.output)
        assert report["n_samples"] == 4
        assert report["face_congruence_deviation"] <= 1e-9
        assert report["classification"]["verdict"] is True
        for s in report["samples"]:
            assert s["max_dihedral_error"] <= 1e-9
            assert s["max_flat_angle_error"] <= 1e-9


class TestSearchCommand:
    def test_small_search(self, runner, tmp_path):
        cfg = {
            "deltas_deg": [90, 90, 90, 90],
            "thetas_deg": [110.0, 95.2, 70.0, 70.5],
            "seed_count": 150,
            "rng_seed": 3,
            "trace": {"enabled": False},
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = str(tmp_path / "solutions.json")
        res = runner.invoke(main, ["search", str(cfg_path), "--out", out])
        assert res.exit_code == 0, res.output
        data = json.loads(open(out).read())
        assert "solutions" in data and "stats" in data
