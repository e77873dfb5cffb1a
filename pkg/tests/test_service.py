import math

import pytest
from fastapi.testclient import TestClient

from starsync.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def network_body(**overrides):
    body = {
        "network": {
            "n": 2,
            "mass": 1.0,
            "hooke": [1.0, 1.0, 1.0],
            "couplings": [1.0, 1.0],
            "bath_rate": 0.1,
        }
    }
    body.update(overrides)
    return body


class TestHealth:
    def test_health(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"


class TestModesEndpoint:
    def test_uniform_network_report(self, client):
        resp = client.post("/v1/modes", json=network_body())
        assert resp.status_code == 200
        body = resp.json()
        rows = body["report"]["modes"]
        freqs = [row["freq_perturbative"] for row in rows]
        tags = [row["tag"] for row in rows]
        assert freqs == pytest.approx([1.0, math.sqrt(2.0), 2.0])
        assert tags == ["leaking-", "protected", "leaking+"]
        assert "modes.csv" in body["artifacts"]

    def test_validation_error_is_422(self, client):
        body = network_body()
        del body["network"]["mass"]
        resp = client.post("/v1/modes", json=body)
        assert resp.status_code == 422
        assert any("mass" in str(err["loc"]) for err in resp.json()["detail"])

    def test_degenerate_network_is_400(self, client):
        body = network_body()
        body["network"]["couplings"] = [0.0, 0.0]
        resp = client.post("/v1/modes", json=body)
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "degenerate_network"


class TestSweepEndpoint:
    def test_sweep(self, client):
        body = network_body(
            sweep={"g_min": 1.0, "g_max": 10.0, "steps": 8, "offsets": [0.0, 0.1]}
        )
        resp = client.post("/v1/sweep", json=body)
        assert resp.status_code == 200
        assert "sweep.csv" in resp.json()["artifacts"]

    def test_missing_section_is_400(self, client):
        resp = client.post("/v1/sweep", json=network_body())
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "parameter_error"


class TestEvolveEndpoint:
    def test_evolve(self, client):
        body = network_body(
            initial_state={
                "frame": "normal",
                "preparations": [
                    {"kind": "coherent", "alpha": 0.5},
                    {"kind": "vacuum"},
                    {"kind": "coherent", "alpha": 0.3},
                ],
            },
            time={"t_max": 150.0, "samples": 4001},
        )
        resp = client.post("/v1/evolve", json=body)
        assert resp.status_code == 200
        body = resp.json()
        assert "trajectory.csv" in body["artifacts"]
        assert "metrics" in body["report"]

    def test_wrong_preparation_count_is_400(self, client):
        body = network_body(
            initial_state={"frame": "normal", "preparations": [{"kind": "vacuum"}]},
            time={"t_max": 1.0, "samples": 10},
        )
        resp = client.post("/v1/evolve", json=body)
        assert resp.status_code == 400


class TestOracleEndpoint:
    def test_oracle_small(self, client):
        body = network_body(
            initial_state={
                "frame": "normal",
                "preparations": [
                    {"kind": "coherent", "alpha": 0.3},
                    {"kind": "vacuum"},
                    {"kind": "coherent", "alpha": 0.4},
                ],
            },
            time={"t_max": 2.0, "samples": 11},
            oracle={"cutoff": 5},
        )
        resp = client.post("/v1/oracle", json=body)
        assert resp.status_code == 200
        report = resp.json()["report"]
        assert report["max_disagreement"] < 1e-4
        assert report["diagnostics"]["trace_deviation"] < 1e-6

    def test_resource_cap_is_500(self, client):
        body = network_body(
            initial_state={
                "frame": "normal",
                "preparations": [{"kind": "vacuum"}] * 3,
            },
            time={"t_max": 1.0, "samples": 5},
            oracle={"cutoff": 30},
        )
        resp = client.post("/v1/oracle", json=body)
        assert resp.status_code == 500
        assert resp.json()["error"]["code"] == "resource_limit"
