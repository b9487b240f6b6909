from __future__ import annotations

from fastapi.testclient import TestClient

from nli_service.app import create_app
from nli_service.config import ServiceConfig
from nli_service.models import StubModel


def stub_client(max_batch: int = 64) -> TestClient:
    app = create_app(ServiceConfig(model_id="stub", max_batch=max_batch), model=StubModel())
    return TestClient(app)


def score(client, pairs):
    return client.post("/v1/score", json={"pairs": pairs})


PAIRS = [
    {"premise": "Some apples are red.", "hypothesis": "30% apples are red."},
    {"premise": "Few tomatoes are green.", "hypothesis": "5% tomatoes are green."},
]


class TestHealth:
    def test_before_load_is_503(self):
        client = TestClient(create_app(ServiceConfig(model_id="stub"), model=None))
        assert client.get("/v1/health").status_code == 503

    def test_lifespan_loads_configured_model(self):
        app = create_app(ServiceConfig(model_id="stub"), model=None)
        with TestClient(app) as client:
            response = client.get("/v1/health")
            assert response.status_code == 200
            assert response.json()["model_id"] == "stub"

    def test_repeated_calls_stable(self):
        client = stub_client()
        first = client.get("/v1/health")
        second = client.get("/v1/health")
        assert first.status_code == second.status_code == 200
        assert first.json() == second.json()


class TestScore:
    def test_batch_aligned_with_request(self):
        client = stub_client()
        response = score(client, PAIRS)
        assert response.status_code == 200
        body = response.json()
        assert body["model_id"] == "stub"
        assert len(body["results"]) == len(PAIRS)
        singles = [
            score(client, [pair]).json()["results"][0] for pair in PAIRS
        ]
        assert body["results"] == singles

    def test_empty_pairs_is_400(self):
        assert score(stub_client(), []).status_code == 400

    def test_missing_fields_is_400(self):
        client = stub_client()
        assert client.post("/v1/score", json={"pairs": [{"premise": "x"}]}).status_code == 400
        assert client.post("/v1/score", json={"nope": 1}).status_code == 400
        assert score(client, [{"premise": "", "hypothesis": "y"}]).status_code == 400

    def test_non_json_body_is_400(self):
        client = stub_client()
        response = client.post(
            "/v1/score", content=b"not json", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400

    def test_oversize_batch_is_413(self):
        client = stub_client(max_batch=2)
        response = score(client, PAIRS + PAIRS)
        assert response.status_code == 413

    def test_model_not_loaded_is_503(self):
        client = TestClient(create_app(ServiceConfig(model_id="stub"), model=None))
        assert score(client, PAIRS).status_code == 503

    def test_identical_requests_identical_responses(self):
        client = stub_client()
        assert score(client, PAIRS).json() == score(client, PAIRS).json()
