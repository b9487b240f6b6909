"""Entailment-scoring boundary: remote client, deterministic mock, cache.

Every backend maps a (premise, hypothesis) pair to a three-class
probability triple (entail, neutral, contradict) summing to 1. The engine
consumes only the entail component; the other two are kept for sensitivity
analyses. Backends expose a stable scorer_id so cached results from
different models never collide.

Wire protocol (shared with the scoring service):

    POST {base_url}/v1/score
    request  {"pairs": [{"premise": "...", "hypothesis": "..."}, ...]}
    response {"results": [{"entail": f, "neutral": f, "contradict": f}, ...],
              "model_id": "..."}

400 = malformed request, 503 = model not loaded.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

logger = logging.getLogger(__name__)

SCORER_URL_ENV = "PRESQUE_SCORER_URL"

SIMPLEX_TOLERANCE = 1e-6


class BackendUnavailable(RuntimeError):
    """Remote scorer unreachable, timed out, or not ready."""


class ProtocolError(RuntimeError):
    """Remote scorer answered with a malformed or invalid response."""


@dataclass(frozen=True)
class EntailmentQuery:
    premise: str
    hypothesis: str

    def __post_init__(self) -> None:
        if not self.premise or not self.hypothesis:
            raise ValueError("premise and hypothesis must be non-empty")


@dataclass(frozen=True)
class EntailmentResult:
    entail: float
    neutral: float
    contradict: float

    def check_simplex(self) -> "EntailmentResult":
        total = self.entail + self.neutral + self.contradict
        for name, v in (("entail", self.entail), ("neutral", self.neutral),
                        ("contradict", self.contradict)):
            if not 0.0 <= v <= 1.0:
                raise ProtocolError(f"{name} probability {v} outside [0, 1]")
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise ProtocolError(f"class probabilities sum to {total}, not 1")
        return self


class EntailmentScorer(Protocol):
    """What the engine needs from any scoring backend."""

    scorer_id: str

    def score(self, q: EntailmentQuery) -> EntailmentResult: ...

    def score_batch(self, qs: Sequence[EntailmentQuery]) -> list[EntailmentResult]: ...


def _sequential_batch(scorer: EntailmentScorer, qs: Sequence[EntailmentQuery]) -> list[EntailmentResult]:
    if not qs:
        raise ValueError("score_batch requires a non-empty query list")
    return [scorer.score(q) for q in qs]


REFLEXIVE_RESULT = EntailmentResult(entail=0.99, neutral=0.005, contradict=0.005)
UNKNOWN_RESULT = EntailmentResult(entail=1 / 3, neutral=1 / 3, contradict=1 / 3)


class MockScorer:
    """Content-addressed lookup table for hermetic runs.

    Identical premise/hypothesis pairs score as near-certain entailment;
    pairs absent from the table fall back to the uniform triple. scorer_id
    hashes the table so caches keyed on it stay table-specific.
    """

    def __init__(self, table: dict[tuple[str, str], EntailmentResult] | None = None):
        self.table = dict(table or {})
        digest = hashlib.sha256(
            json.dumps(
                [[p, h, r.entail, r.neutral, r.contradict]
                 for (p, h), r in sorted(self.table.items())]
            ).encode()
        ).hexdigest()[:16]
        self.scorer_id = f"mock:{digest}"

    @classmethod
    def from_json(cls, path: str | Path) -> "MockScorer":
        """Load a table from JSON: [{"premise", "hypothesis", "entail", "neutral", "contradict"}, ...]."""
        rows = json.loads(Path(path).read_text(encoding="utf-8"))
        table = {
            (row["premise"], row["hypothesis"]): EntailmentResult(
                entail=row["entail"], neutral=row["neutral"], contradict=row["contradict"]
            )
            for row in rows
        }
        return cls(table)

    def score(self, q: EntailmentQuery) -> EntailmentResult:
        hit = self.table.get((q.premise, q.hypothesis))
        if hit is not None:
            return hit
        if q.premise == q.hypothesis:
            return REFLEXIVE_RESULT
        return UNKNOWN_RESULT

    def score_batch(self, qs: Sequence[EntailmentQuery]) -> list[EntailmentResult]:
        return _sequential_batch(self, qs)


class ScoreCache:
    """Append-only persistent memo of scored pairs.

    Keys are (scorer_id, sha256(premise), sha256(hypothesis)); values are
    stored as JSON lines so reloads return byte-identical floats. Reads are
    lock-free; writes are serialized.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[tuple[str, str, str], EntailmentResult] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                row = json.loads(line)
                self._entries[(row["scorer_id"], row["premise_sha"], row["hypothesis_sha"])] = (
                    EntailmentResult(row["entail"], row["neutral"], row["contradict"])
                )

    @staticmethod
    def _key(scorer_id: str, q: EntailmentQuery) -> tuple[str, str, str]:
        return (
            scorer_id,
            hashlib.sha256(q.premise.encode()).hexdigest(),
            hashlib.sha256(q.hypothesis.encode()).hexdigest(),
        )

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, scorer_id: str, q: EntailmentQuery) -> EntailmentResult | None:
        return self._entries.get(self._key(scorer_id, q))

    def put(self, scorer_id: str, q: EntailmentQuery, result: EntailmentResult) -> None:
        key = self._key(scorer_id, q)
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = result
            if self.path is not None:
                line = json.dumps(
                    {
                        "scorer_id": key[0],
                        "premise_sha": key[1],
                        "hypothesis_sha": key[2],
                        "entail": result.entail,
                        "neutral": result.neutral,
                        "contradict": result.contradict,
                    }
                )
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")


class CachingScorer:
    """Transparent cache wrapper: results equal the uncached backend's."""

    def __init__(self, inner: EntailmentScorer, cache: ScoreCache):
        self.inner = inner
        self.cache = cache

    @property
    def scorer_id(self) -> str:
        return self.inner.scorer_id

    def score(self, q: EntailmentQuery) -> EntailmentResult:
        hit = self.cache.get(self.scorer_id, q)
        if hit is not None:
            return hit
        result = self.inner.score(q)
        self.cache.put(self.scorer_id, q, result)
        return result

    def score_batch(self, qs: Sequence[EntailmentQuery]) -> list[EntailmentResult]:
        if not qs:
            raise ValueError("score_batch requires a non-empty query list")
        results: list[EntailmentResult | None] = []
        misses: list[int] = []
        for i, q in enumerate(qs):
            hit = self.cache.get(self.scorer_id, q)
            results.append(hit)
            if hit is None:
                misses.append(i)
        if misses:
            fresh = self.inner.score_batch([qs[i] for i in misses])
            for i, result in zip(misses, fresh):
                self.cache.put(self.scorer_id, qs[i], result)
                results[i] = result
        return results  # type: ignore[return-value]


class RemoteScorer:
    """HTTP client for the scoring service.

    Queries are chunked to batch_size pairs per request; chunks may be
    posted concurrently up to parallelism, and results are reassembled by
    position so scheduling never changes output. Any failed chunk aborts
    the whole batch.
    """

    def __init__(
        self,
        base_url: str,
        *,
        batch_size: int = 32,
        parallelism: int = 1,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if batch_size < 1 or parallelism < 1:
            raise ValueError("batch_size and parallelism must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.parallelism = parallelism
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._model_id: str | None = None

    @property
    def scorer_id(self) -> str:
        if self._model_id is None:
            self._model_id = self._fetch_model_id()
        return f"remote:{self._model_id}"

    def _fetch_model_id(self) -> str:
        data = self._request("GET", "/v1/health")
        model_id = data.get("model_id")
        if not isinstance(model_id, str) or not model_id:
            raise ProtocolError(f"health response missing model_id: {data!r}")
        return model_id

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        try:
            response = self._client.request(method, self.base_url + path, json=payload)
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"scorer at {self.base_url} unreachable: {exc}") from exc
        if response.status_code == 503:
            raise BackendUnavailable(f"scorer at {self.base_url} reports model not ready")
        if response.status_code >= 500:
            raise BackendUnavailable(f"scorer error {response.status_code}: {response.text[:200]}")
        if response.status_code != 200:
            raise ProtocolError(f"scorer rejected request ({response.status_code}): {response.text[:200]}")
        try:
            data = response.json()
        except ValueError as exc:
            raise ProtocolError(f"non-JSON response from scorer: {exc}") from exc
        if not isinstance(data, dict):
            raise ProtocolError(f"expected JSON object, got {type(data).__name__}")
        return data

    def _score_chunk(self, chunk: Sequence[EntailmentQuery]) -> list[EntailmentResult]:
        payload = {"pairs": [{"premise": q.premise, "hypothesis": q.hypothesis} for q in chunk]}
        data = self._request("POST", "/v1/score", payload)
        results = data.get("results")
        model_id = data.get("model_id")
        if not isinstance(results, list) or len(results) != len(chunk):
            raise ProtocolError(f"expected {len(chunk)} results, got {results!r:.200}")
        if isinstance(model_id, str) and model_id:
            self._model_id = model_id
        parsed = []
        for row in results:
            try:
                parsed.append(
                    EntailmentResult(
                        float(row["entail"]), float(row["neutral"]), float(row["contradict"])
                    ).check_simplex()
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError(f"malformed result row {row!r}") from exc
        return parsed

    def score(self, q: EntailmentQuery) -> EntailmentResult:
        return self._score_chunk([q])[0]

    def score_batch(self, qs: Sequence[EntailmentQuery]) -> list[EntailmentResult]:
        if not qs:
            raise ValueError("score_batch requires a non-empty query list")
        chunks = [qs[i : i + self.batch_size] for i in range(0, len(qs), self.batch_size)]
        if self.parallelism == 1 or len(chunks) == 1:
            gathered = [self._score_chunk(chunk) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.parallelism) as pool:
                gathered = list(pool.map(self._score_chunk, chunks))
        return [result for chunk in gathered for result in chunk]

    def close(self) -> None:
        self._client.close()
