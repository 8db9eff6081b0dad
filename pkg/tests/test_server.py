"""HTTP API through the FastAPI test client (no socket binding)."""
import json
import math

import pytest
from fastapi.testclient import TestClient

from kokonet.server import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def qs_payload(**kw):
    base = {"alpha_deg": 105.0, "beta_deg": 15.0, "gamma_deg": 120.0,
            "branch": "+", "samples": 4}
    base.update(kw)
    return base


class TestQsEndpoint:
    def test_bundle_and_classification(self, client):
        r = client.post("/qs", json=qs_payload())
        assert r.status_code == 200
        body = r.json()
        assert body["classification"]["verdict"] is True
        assert len(body["bundle"]["samples"]) == 4
        assert body["check"]["face_congruence_deviation"] <= 1e-9
        assert "bundle_id" in body

    def test_domain_error_422(self, client):
        r = client.post("/qs", json=qs_payload(alpha_deg=90.0, beta_deg=90.0,
                                               gamma_deg=90.0))
        assert r.status_code == 422
        assert r.json()["detail"]["error"] == "NotElliptic"

    def test_schema_error_400(self, client):
        r = client.post("/qs", json={"alpha_deg": "not-a-number"})
        assert r.status_code == 400
        assert r.json()["error"] == "SchemaViolation"


class TestBundleCache:
    def test_round_trip(self, client):
        body = client.post("/qs", json=qs_payload()).json()
        bid = body["bundle_id"]
        r = client.get(f"/bundle/{bid}")
        assert r.status_code == 200
        assert r.json() == body["bundle"]

    def test_missing_bundle_404(self, client):
        assert client.get("/bundle/deadbeef").status_code == 404


class TestClassifyEndpoint:
    def test_verdict_matches_cli_schema(self, client):
        net = {
            "angles": {
                "alpha": [26.20, 16.16, 134.65, 117.95],
                "beta": [82.24, 130.87, 34.44, 49.52],
                "gamma": [21.94, 18.85, 145.36, 149.02],
                "delta": [60.0, 115.0, 80.0, 105.0],
            },
            "unit": "deg",
        }
        r = client.post("/classify", json={"net": net, "tol": 1e-3})
        assert r.status_code == 200
        body = r.json()
        assert body["verdict"] is True
        assert abs(body["modulus"] - 1.22) < 1e-2

    def test_bad_angles_422(self, client):
        net = {"angles": {"alpha": [0.0, 1, 1, 1], "beta": [1, 1, 1, 1],
                          "gamma": [1, 1, 1, 1], "delta": [90, 90, 90, 90]},
               "unit": "deg"}
        r = client.post("/classify", json={"net": net})
        assert r.status_code == 422


class TestFlexEndpoint:
    def test_trace(self, client):
        import sys
        from pathlib import Path

        sys.path.insert(0, str(Path(__file__).parent))
        from paperdata import ORTHO90_COS, ORTHO90_T_RANGE

        net = {
            "angles": {
                "alpha": [math.degrees(math.acos(c)) for c in ORTHO90_COS["alpha"]],
                "beta": [math.degrees(math.acos(c)) for c in ORTHO90_COS["beta"]],
                "gamma": [math.degrees(math.acos(c)) for c in ORTHO90_COS["gamma"]],
                "delta": [90.0] * 4,
            },
            "unit": "deg",
        }
        lo, hi = ORTHO90_T_RANGE
        t0 = 0.5 * (lo + hi)
        r = client.post("/flex", json={
            "net": net,
            "theta1_deg": math.degrees(2 * math.atan2(1.0, t0)),
            "t_min": lo + 0.02, "t_max": hi - 0.02, "steps": 7,
        })
        assert r.status_code == 200
        body = r.json()
        assert len(body["bundle"]["samples"]) == 7
        assert body["check"]["any_self_intersection"] is False


class TestSearchEndpoint:
    def test_small_search(self, client):
        r = client.post("/search", json={
            "deltas_deg": [90, 90, 90, 90],
            "thetas_deg": [110.0, 95.2, 70.0, 70.5],
            "seed_count": 120,
            "rng_seed": 3,
            "trace": {"enabled": False},
        })
        assert r.status_code == 200
        body = r.json()
        assert "stats" in body and "solutions" in body

    def test_responses_match_cli_file_output(self, client, tmp_path):
        # the serve payload equals what the CLI writes for the same request
        from click.testing import CliRunner

        from kokonet.cli import main as cli_main

        cfg = {
            "deltas_deg": [90, 90, 90, 90],
            "thetas_deg": [110.0, 95.2, 70.0, 70.5],
            "seed_count": 120,
            "rng_seed": 3,
            "trace": {"enabled": False},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "sol.json"
        res = CliRunner().invoke(cli_main, ["search", str(path), "--out", str(out)])
        assert res.exit_code == 0
        file_payload = json.loads(out.read_text())
        http_payload = client.post("/search", json=cfg).json()
        assert http_payload["stats"] == file_payload["stats"]
        assert http_payload["solutions"] == file_payload["solutions"]
