"""Listener models over the percentage grid.

Given a quantified sentence S_q and its percentage rewrites S_p:

    literal listener   L0(p|q)  proportional to  entail(S_q, S_p)
    literal speaker    S0(q|p)  proportional to  entail(S_p, S_q)
    percentage prior   P(p) = sum_q' P(p|q') P(q')   with P(p|q') an
                       L0-style curve for the sentence rewritten with q',
                       normalized per q' before mixing
    pragmatic listener L1(p|q)  proportional to  S0(q|p) * P(p)

Raw proportional scores are retained everywhere; normalization happens on
demand (ranking is scale-invariant, only cross-entropy needs a
distribution). All iteration runs over sorted grid points and sorted
quantifiers so results never depend on scheduling.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .grid import PercentageGrid, QuantifierInventory
from .scorer import EntailmentQuery, EntailmentScorer
from .templating import QuantifiedRecord, substitute_percentage, substitute_quantifier

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9

# Approximate English word frequencies (occurrences per million tokens) for
# the default inventory, from a general web-scale frequency lexicon. Only
# the relative weights matter: the prior is normalized over the active
# inventory at load, and an override file can replace the table entirely.
WORD_FREQUENCIES_PER_MILLION: dict[str, float] = {
    "all": 3000.0,
    "generally": 85.0,
    "most": 780.0,
    "usually": 230.0,
    "some": 1900.0,
    "likely": 250.0,
    "few": 480.0,
    "little": 620.0,
    "occasionally": 45.0,
    "none": 180.0,
    "seldom": 16.0,
    "tiny": 78.0,
    "small": 550.0,
    "moderate": 40.0,
    "large": 460.0,
}


@dataclass(frozen=True)
class QuantifierPrior:
    """P(q): normalized word-frequency weight per inventory lexeme."""

    weights: Mapping[str, float]

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("prior must cover at least one quantifier")
        for q, w in self.weights.items():
            if w <= 0:
                raise ValueError(f"prior weight for {q!r} must be positive, got {w}")
        total = math.fsum(self.weights.values())
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"prior weights sum to {total}, not 1")

    @classmethod
    def from_frequencies(
        cls,
        inventory: QuantifierInventory,
        frequencies: Mapping[str, float] | None = None,
    ) -> "QuantifierPrior":
        """Normalize raw frequencies over the inventory."""
        table = WORD_FREQUENCIES_PER_MILLION if frequencies is None else frequencies
        missing = [q for q in inventory if q not in table]
        if missing:
            raise ValueError(f"no frequency for quantifiers: {missing}")
        total = math.fsum(table[q] for q in inventory)
        return cls(weights={q: table[q] / total for q in inventory})

    @classmethod
    def from_file(cls, path, inventory: QuantifierInventory) -> "QuantifierPrior":
        """Load a two-column override file: `lexeme weight` per line."""
        table: dict[str, float] = {}
        for lineno, line in enumerate(open(path, encoding="utf-8"), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected `lexeme weight`, got {line!r}")
            table[parts[0]] = float(parts[1])
        return cls.from_frequencies(inventory, table)


@dataclass(frozen=True)
class ListenerDistribution:
    """Scores over the grid for one sentence (or one aggregated quantifier).

    scores hold raw proportional values unless normalized is set; use
    normalize() for the distribution view.
    """

    record_id: str
    quantifier: str
    kind: str  # "L0" or "L1"
    scores: Mapping[Fraction, float]
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("L0", "L1"):
            raise ValueError(f"kind must be L0 or L1, got {self.kind!r}")
        if any(v < 0 for v in self.scores.values()):
            raise ValueError("scores must be non-negative")
        if self.normalized:
            total = math.fsum(self.scores.values())
            if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
                raise ValueError(f"normalized distribution sums to {total}")

    @property
    def grid_points(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.scores))

    def normalize(self) -> "ListenerDistribution":
        """Distribution view of the raw scores.

        An all-zero curve (every rewrite scored zero entailment) falls back
        to uniform rather than dividing by zero.
        """
        if self.normalized:
            return self
        return replace(self, scores=_normalize_curve(self.scores, self.record_id), normalized=True)


def _normalize_curve(scores: Mapping[Fraction, float], context: str) -> dict[Fraction, float]:
    points = sorted(scores)
    total = math.fsum(scores[p] for p in points)
    if total <= 0.0:
        logger.warning("all-zero score curve for %s; falling back to uniform", context)
        return {p: 1.0 / len(points) for p in points}
    return {p: scores[p] / total for p in points}


def _percentage_queries(
    rec: QuantifiedRecord, grid: PercentageGrid, premise: str
) -> list[EntailmentQuery]:
    return [
        EntailmentQuery(premise=premise, hypothesis=substitute_percentage(rec, p))
        for p in grid.points
    ]


def literal_listener(
    rec: QuantifiedRecord, grid: PercentageGrid, scorer: EntailmentScorer
) -> ListenerDistribution:
    """L0: entailment of each percentage rewrite by the quantified sentence."""
    results = scorer.score_batch(_percentage_queries(rec, grid, premise=rec.text))
    scores = {p: r.entail for p, r in zip(grid.points, results)}
    return ListenerDistribution(
        record_id=rec.source_id, quantifier=rec.quantifier, kind="L0", scores=scores
    )


def literal_speaker(
    rec: QuantifiedRecord, q: str, p: Fraction, scorer: EntailmentScorer
) -> float:
    """S0: entailment of the quantified sentence by the percentage rewrite.

    For the record's own quantifier the hypothesis is the original text
    verbatim; other lexemes are spliced into the span.
    """
    hypothesis = rec.text if q == rec.quantifier else substitute_quantifier(rec, q)
    query = EntailmentQuery(premise=substitute_percentage(rec, p), hypothesis=hypothesis)
    return scorer.score(query).entail


def percentage_prior(
    rec: QuantifiedRecord,
    grid: PercentageGrid,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior,
) -> dict[Fraction, float]:
    """P(p): mixture over the inventory of per-quantifier percentage curves.

    Each P(p|q') is the L0-style curve of the sentence rewritten with q',
    normalized before mixing so high-entailment quantifiers cannot dominate
    by scale; the mixture is normalized over the grid.
    """
    lexemes = sorted(qprior.weights)
    queries = [
        EntailmentQuery(
            premise=substitute_quantifier(rec, q),
            hypothesis=substitute_percentage(rec, p),
        )
        for q in lexemes
        for p in grid.points
    ]
    results = scorer.score_batch(queries)
    mixture = {p: 0.0 for p in grid.points}
    n = len(grid.points)
    for i, q in enumerate(lexemes):
        curve = {p: results[i * n + j].entail for j, p in enumerate(grid.points)}
        curve = _normalize_curve(curve, f"{rec.source_id}|{q}")
        weight = qprior.weights[q]
        for p in grid.points:
            mixture[p] += weight * curve[p]
    return _normalize_curve(mixture, f"{rec.source_id}|prior")


def pragmatic_listener(
    rec: QuantifiedRecord,
    grid: PercentageGrid,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior,
) -> ListenerDistribution:
    """L1: speaker score times the percentage prior, point by point."""
    prior = percentage_prior(rec, grid, scorer, qprior)
    hypothesis = rec.text
    speaker_queries = [
        EntailmentQuery(premise=substitute_percentage(rec, p), hypothesis=hypothesis)
        for p in grid.points
    ]
    results = scorer.score_batch(speaker_queries)
    scores = {p: r.entail * prior[p] for p, r in zip(grid.points, results)}
    return ListenerDistribution(
        record_id=rec.source_id, quantifier=rec.quantifier, kind="L1", scores=scores
    )


def listener(
    rec: QuantifiedRecord,
    grid: PercentageGrid,
    kind: str,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior | None = None,
) -> ListenerDistribution:
    """Dispatch on listener kind."""
    if kind == "L0":
        return literal_listener(rec, grid, scorer)
    if kind == "L1":
        if qprior is None:
            raise ValueError("L1 requires a quantifier prior")
        return pragmatic_listener(rec, grid, scorer, qprior)
    raise ValueError(f"unknown listener kind {kind!r}")


@dataclass(frozen=True)
class AggregateResult:
    """Per-quantifier aggregated distributions plus lexemes with no records."""

    per_quantifier: Mapping[str, ListenerDistribution]
    missing: tuple[str, ...]


def aggregate_listener(
    records: Sequence[QuantifiedRecord],
    grid: PercentageGrid,
    kind: str,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior | None = None,
    inventory: QuantifierInventory | None = None,
) -> AggregateResult:
    """Average raw per-sentence curves per quantifier, then normalize.

    This is the model's interpretation L_M(p|q) of each quantifier for
    comparison against human-elicited distributions. Lexemes without any
    record are reported in missing, not raised.
    """
    inventory = inventory or QuantifierInventory()
    by_quantifier: dict[str, list[ListenerDistribution]] = {}
    for rec in records:
        if rec.quantifier not in inventory:
            raise ValueError(f"record {rec.source_id!r} uses unknown quantifier {rec.quantifier!r}")
        by_quantifier.setdefault(rec.quantifier, []).append(listener(rec, grid, kind, scorer, qprior))
    aggregated: dict[str, ListenerDistribution] = {}
    for q in inventory:
        dists = by_quantifier.get(q)
        if not dists:
            continue
        mean = {
            p: math.fsum(d.scores[p] for d in dists) / len(dists) for p in grid.points
        }
        aggregated[q] = ListenerDistribution(
            record_id=f"aggregate:{q}", quantifier=q, kind=kind, scores=mean
        ).normalize()
    missing = tuple(q for q in inventory if q not in aggregated)
    return AggregateResult(per_quantifier=aggregated, missing=missing)
