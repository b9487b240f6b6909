"""Scoring backends: a pretrained NLI checkpoint, a deterministic stub, and
a table replayer for hermetic integration tests.

Every backend returns (entail, neutral, contradict) triples on the
probability simplex, in that fixed wire order regardless of the
checkpoint's native label layout.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Protocol, Sequence

from .config import ServiceConfig

Triple = tuple[float, float, float]

# Checkpoint label names that map onto the wire classes.
_LABEL_SYNONYMS = {
    "entail": ("entailment", "entail", "entails"),
    "neutral": ("neutral",),
    "contradict": ("contradiction", "contradict", "contradicts"),
}


class ScoringModel(Protocol):
    model_id: str

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[Triple]: ...


class StubModel:
    """Content-hashed deterministic scores for tests and dry runs.

    Identical premise/hypothesis pairs always put the bulk of the mass on
    entail; distinct pairs get a stable pseudo-random simplex point.
    """

    model_id = "stub"

    @staticmethod
    def _unit_floats(premise: str, hypothesis: str) -> list[float]:
        digest = hashlib.sha256(f"{premise}\x00{hypothesis}".encode()).digest()
        return [int.from_bytes(digest[i : i + 4], "big") / 2**32 for i in (0, 4, 8)]

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[Triple]:
        results: list[Triple] = []
        for premise, hypothesis in pairs:
            u = self._unit_floats(premise, hypothesis)
            if premise == hypothesis:
                logits = [3.0 + u[0], u[1], u[2]]
            else:
                logits = [2 * x for x in u]
            z = [math.exp(x) for x in logits]
            total = sum(z)
            results.append((z[0] / total, z[1] / total, z[2] / total))
        return results


class TableModel:
    """Replays a JSON score table (the engine's mock-table format) over the
    wire, with the same reflexive/uniform fallbacks the in-process mock
    uses, so a run against this service reproduces a mock run exactly."""

    def __init__(self, path: str | Path):
        rows = json.loads(Path(path).read_text(encoding="utf-8"))
        self.table: dict[tuple[str, str], Triple] = {
            (row["premise"], row["hypothesis"]): (
                row["entail"], row["neutral"], row["contradict"]
            )
            for row in rows
        }
        digest = hashlib.sha256(
            json.dumps(sorted(self.table.items())).encode()
        ).hexdigest()[:16]
        self.model_id = f"table:{digest}"

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[Triple]:
        results: list[Triple] = []
        for premise, hypothesis in pairs:
            hit = self.table.get((premise, hypothesis))
            if hit is not None:
                results.append(hit)
            elif premise == hypothesis:
                results.append((0.99, 0.005, 0.005))
            else:
                results.append((1 / 3, 1 / 3, 1 / 3))
        return results


class TransformersModel:
    """A sequence-classification NLI checkpoint under the wire contract.

    The checkpoint's id2label names decide which logit feeds which wire
    class; unrecognized label names require an explicit label_map, never a
    silent positional guess.
    """

    def __init__(self, config: ServiceConfig):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self._torch = torch
        if config.deterministic:
            torch.manual_seed(0)
        self.model_id = config.model_id
        self.device = config.device
        self.tokenizer = AutoTokenizer.from_pretrained(config.model_id)
        self.model = AutoModelForSequenceClassification.from_pretrained(config.model_id)
        self.model.to(config.device)
        self.model.eval()
        self.label_index = config.label_map or self._labels_from_config(
            self.model.config.id2label
        )

    @staticmethod
    def _labels_from_config(id2label: dict[int, str]) -> dict[str, int]:
        index: dict[str, int] = {}
        for idx, name in id2label.items():
            cleaned = str(name).strip().lower()
            for wire, synonyms in _LABEL_SYNONYMS.items():
                if cleaned in synonyms:
                    index[wire] = int(idx)
        missing = {"entail", "neutral", "contradict"} - set(index)
        if missing:
            raise ValueError(
                f"checkpoint labels {dict(id2label)} do not name {sorted(missing)}; "
                "set NLI_LABEL_MAP explicitly"
            )
        return index

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[Triple]:
        torch = self._torch
        encoded = self.tokenizer(
            [p for p, _ in pairs],
            [h for _, h in pairs],
            padding=True,
            truncation=True,
            return_tensors="pt",
        ).to(self.device)
        with torch.no_grad():
            probs = torch.softmax(self.model(**encoded).logits, dim=-1)
        out: list[Triple] = []
        for row in probs.cpu().tolist():
            out.append(
                (
                    row[self.label_index["entail"]],
                    row[self.label_index["neutral"]],
                    row[self.label_index["contradict"]],
                )
            )
        return out


def build_model(config: ServiceConfig) -> ScoringModel:
    if config.model_id == "stub":
        return StubModel()
    if config.model_id.startswith("table:"):
        return TableModel(config.model_id.removeprefix("table:"))
    return TransformersModel(config)
