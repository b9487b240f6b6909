"""Service-level acceptance: wire-schema conformance under fuzzing, and
interchangeability with the engine's in-process mock over real HTTP."""

from __future__ import annotations

import json
import math
import random
import threading
import time

import httpx
import pytest
import uvicorn
from click.testing import CliRunner
from fastapi.testclient import TestClient

from nli_service.app import create_app
from nli_service.config import ServiceConfig
from nli_service.models import StubModel, TableModel

from . import _toy


class LiveServer:
    """uvicorn on an ephemeral localhost port, in a background thread."""

    def __init__(self, app):
        self._server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> str:
        self._thread.start()
        deadline = time.monotonic() + 10
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)


def random_sentences(rng: random.Random, n: int) -> list[str]:
    nouns = ["apples", "rocks", "vans", "kites", "owls", "tomatoes"]
    verbs = ["are red", "have minerals", "are round", "fly well", "live in forests"]
    return [f"{rng.choice(nouns)} {rng.choice(verbs)} #{rng.randrange(10_000)}" for _ in range(n)]


@pytest.mark.acceptance
def test_criterion_protocol_conformance_fuzz():
    client = TestClient(
        create_app(ServiceConfig(model_id="stub", max_batch=128), model=StubModel())
    )
    rng = random.Random(0)
    sentences = random_sentences(rng, 200)
    pairs = [
        {"premise": sentences[2 * i], "hypothesis": sentences[2 * i + 1]} for i in range(100)
    ]
    response = client.post("/v1/score", json={"pairs": pairs})
    assert response.status_code == 200
    body = response.json()
    assert set(body) == {"results", "model_id"}
    assert isinstance(body["model_id"], str) and body["model_id"]
    assert len(body["results"]) == 100
    for row in body["results"]:
        assert set(row) == {"entail", "neutral", "contradict"}
        values = [row["entail"], row["neutral"], row["contradict"]]
        assert all(isinstance(v, float) and 0.0 <= v <= 1.0 for v in values)
        assert math.isclose(sum(values), 1.0, abs_tol=1e-6)


@pytest.mark.acceptance
def test_criterion_reflexive_pairs_prefer_entail():
    client = TestClient(create_app(ServiceConfig(model_id="stub"), model=StubModel()))
    sentences = random_sentences(random.Random(1), 20)
    pairs = [{"premise": s, "hypothesis": s} for s in sentences]
    body = client.post("/v1/score", json={"pairs": pairs}).json()
    for row in body["results"]:
        assert row["entail"] > row["neutral"]
        assert row["entail"] > row["contradict"]


@pytest.mark.acceptance
def test_criterion_engine_interchangeability(tmp_path):
    """The engine's eval reports are byte-identical whether entailment
    scores come from the in-process mock or from this service replaying
    the same table over HTTP."""
    from presque.cli import main as presque_main

    table = _toy.write_table(tmp_path / "table.json")
    dataset = _toy.write_dataset(tmp_path / "toy.jsonl")
    config = _toy.write_config(tmp_path / "config.yaml")

    def run(out, scorer_args):
        result = CliRunner().invoke(
            presque_main,
            [
                "--config", str(config),
                "--k", "3",
                "--seed", "5",
                *scorer_args,
                "--out", str(out),
                "eval", str(dataset),
            ],
        )
        assert result.exit_code == 0, result.output
        return out

    mock_out = run(tmp_path / "mock", ["--scorer", "mock", "--mock-table", str(table)])
    app = create_app(ServiceConfig(model_id=f"table:{table}"), model=TableModel(table))
    with LiveServer(app) as base_url:
        remote_out = run(
            tmp_path / "remote", ["--scorer", "remote", "--scorer-url", base_url]
        )
    for name in ("records.csv", "aggregates.csv", "report.json"):
        assert (mock_out / name).read_bytes() == (remote_out / name).read_bytes(), name


def test_remote_client_matches_direct_service_call(tmp_path):
    from presque.scorer import EntailmentQuery, RemoteScorer

    table = _toy.write_table(tmp_path / "table.json")
    app = create_app(ServiceConfig(model_id=f"table:{table}"), model=TableModel(table))
    premise, hypothesis = next(iter(_toy.build_table()))
    with LiveServer(app) as base_url:
        remote = RemoteScorer(base_url)
        via_client = remote.score(EntailmentQuery(premise=premise, hypothesis=hypothesis))
        direct = httpx.post(
            f"{base_url}/v1/score",
            json={"pairs": [{"premise": premise, "hypothesis": hypothesis}]},
        ).json()["results"][0]
        assert via_client.entail == direct["entail"]
        assert via_client.neutral == direct["neutral"]
        assert via_client.contradict == direct["contradict"]
        assert remote.scorer_id == f"remote:table:{TableModel(table).model_id.split(':')[1]}"


def test_health_over_live_socket(tmp_path):
    app = create_app(ServiceConfig(model_id="stub"), model=StubModel())
    with LiveServer(app) as base_url:
        body = httpx.get(f"{base_url}/v1/health").json()
        assert body == {"model_id": "stub"}
