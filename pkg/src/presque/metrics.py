"""Evaluation quantities for listener predictions against gold scopes.

Rank-based: HIT@1 (top point inside the gold scope) and MRR, defined as
beta / (B_m * sum of the 1-based ranks of the gold points), with
B_m = p_max - p_min + beta. Probability-based: cross-entropy of the
normalized curve on the gold points, and a human-vs-model cross-entropy
averaged over quantifiers. Scope-based: span F1 between the gold scope and
the primary scope (the maximal-mass consecutive run within the top K),
consecutiveness of the top K, and MSD@K, the B_m-normalized distance of
out-of-scope top-K points to the nearest gold endpoint.

Ties in ranking are broken toward the smaller grid point, everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .grid import PercentageGrid
from .grounding import GoldScope
from .rsa import ListenerDistribution

LOG_FLOOR = 1e-12


class GridMismatch(ValueError):
    """Prediction and gold scope live on different grids."""


class DegenerateDistribution(ValueError):
    """All-zero curve where a probability distribution is required."""


class InventoryMismatch(ValueError):
    """Human and model interpretations share no quantifier."""


@dataclass(frozen=True)
class RankedPrediction:
    """Full-grid ranking: (point, score) pairs, best first.

    entries are sorted by descending score with ties broken by ascending
    grid point, and always cover every grid point exactly once.
    """

    grid: PercentageGrid
    entries: tuple[tuple[Fraction, float], ...]

    def __post_init__(self) -> None:
        if tuple(sorted(p for p, _ in self.entries)) != self.grid.points:
            raise GridMismatch("entries must be a permutation of the grid points")
        for (p1, s1), (p2, s2) in zip(self.entries, self.entries[1:]):
            if s1 < s2 or (s1 == s2 and p1 > p2):
                raise ValueError("entries must be sorted by (-score, point)")

    @classmethod
    def from_scores(
        cls, scores: Mapping[Fraction, float], grid: PercentageGrid
    ) -> "RankedPrediction":
        entries = tuple(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))
        return cls(grid=grid, entries=entries)

    @classmethod
    def from_distribution(
        cls, dist: ListenerDistribution, grid: PercentageGrid
    ) -> "RankedPrediction":
        return cls.from_scores(dist.scores, grid)

    def top(self, k: int) -> tuple[Fraction, ...]:
        if not 1 <= k <= len(self.entries):
            raise ValueError(f"k must be in [1, {len(self.entries)}], got {k}")
        return tuple(p for p, _ in self.entries[:k])

    def rank_of(self, p: Fraction) -> int:
        """1-based rank of a grid point."""
        for i, (point, _) in enumerate(self.entries, start=1):
            if point == p:
                return i
        raise GridMismatch(f"{p} is not on the prediction's grid")

    def score_of(self, p: Fraction) -> float:
        for point, score in self.entries:
            if point == p:
                return score
        raise GridMismatch(f"{p} is not on the prediction's grid")


@dataclass(frozen=True)
class PrimaryScope:
    """Maximal-mass consecutive run of grid points within a top-K set."""

    p_min: Fraction
    p_max: Fraction
    mass: float


def scope_points(p_min: Fraction, p_max: Fraction, grid: PercentageGrid) -> tuple[Fraction, ...]:
    """Grid points covered by a closed scope."""
    if p_min not in grid or p_max not in grid:
        raise GridMismatch(f"scope [{p_min}, {p_max}] is not grid-aligned")
    return tuple(p for p in grid.points if p_min <= p <= p_max)


def _check_gold(pred: RankedPrediction, gold: GoldScope) -> None:
    if gold.p_min not in pred.grid or gold.p_max not in pred.grid:
        raise GridMismatch(f"gold scope [{gold.p_min}, {gold.p_max}] off the prediction grid")


def hit_at_1(pred: RankedPrediction, gold: GoldScope) -> int:
    """1 iff the top-ranked point lies inside the gold scope."""
    _check_gold(pred, gold)
    top = pred.top(1)[0]
    return int(gold.p_min <= top <= gold.p_max)


def mrr(pred: RankedPrediction, gold: GoldScope, beta: Fraction) -> float:
    """beta / (B_m * sum of gold-point ranks), B_m = p_max - p_min + beta."""
    _check_gold(pred, gold)
    b_m = gold.p_max - gold.p_min + beta
    rank_sum = sum(pred.rank_of(p) for p in scope_points(gold.p_min, gold.p_max, pred.grid))
    return float(beta / (b_m * rank_sum))


def cross_entropy_gold(dist: ListenerDistribution, gold: GoldScope) -> float:
    """Negative log-mass (natural log) the normalized curve puts on the gold points."""
    raw_total = math.fsum(dist.scores.values())
    if raw_total <= 0.0:
        raise DegenerateDistribution("cannot normalize an all-zero curve")
    points = sorted(dist.scores)
    if gold.p_min not in dist.scores or gold.p_max not in dist.scores:
        raise GridMismatch(f"gold scope [{gold.p_min}, {gold.p_max}] off the distribution grid")
    total = 0.0
    for p in points:
        if gold.p_min <= p <= gold.p_max:
            prob = dist.scores[p] / raw_total
            total -= math.log(max(prob, LOG_FLOOR))
    return total


def hvd_cross_entropy(
    human: "HumanInterpretation", model: Mapping[str, ListenerDistribution]
) -> float:
    """Mean (over shared quantifiers) cross-entropy of the model's normalized
    interpretation under the human one."""
    shared = sorted(set(human.per_quantifier) & set(model))
    if not shared:
        raise InventoryMismatch("human and model interpretations share no quantifier")
    total = 0.0
    for q in shared:
        hdist = human.per_quantifier[q]
        mdist = model[q].normalize().scores
        if set(hdist) != set(mdist):
            raise GridMismatch(f"human and model grids differ for {q!r}")
        for p in sorted(hdist):
            total -= hdist[p] * math.log(max(mdist[p], LOG_FLOOR))
    return total / len(shared)


@dataclass(frozen=True)
class HumanInterpretation:
    """Per-quantifier normalized distributions elicited from annotators."""

    per_quantifier: Mapping[str, Mapping[Fraction, float]]

    def __post_init__(self) -> None:
        for q, dist in self.per_quantifier.items():
            total = math.fsum(dist.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"distribution for {q!r} sums to {total}, not 1")


def _runs(points: tuple[Fraction, ...], beta: Fraction) -> list[tuple[Fraction, ...]]:
    """Split sorted points into maximal runs with gap exactly beta."""
    runs: list[tuple[Fraction, ...]] = []
    current: list[Fraction] = []
    for p in points:
        if current and p - current[-1] != beta:
            runs.append(tuple(current))
            current = []
        current.append(p)
    if current:
        runs.append(tuple(current))
    return runs


def consecutive_at_k(pred: RankedPrediction, k: int) -> int:
    """1 iff the top-K points form one gap-free run on the grid."""
    points = tuple(sorted(pred.top(k)))
    return int(len(_runs(points, pred.grid.beta)) == 1)


def primary_scope(pred: RankedPrediction, k: int) -> PrimaryScope:
    """Largest-mass consecutive run among the top-K points.

    Mass is the sum of the run's scores; ties go to the run with the
    smaller lower endpoint.
    """
    points = tuple(sorted(pred.top(k)))
    best: PrimaryScope | None = None
    for run in _runs(points, pred.grid.beta):
        mass = math.fsum(pred.score_of(p) for p in run)
        candidate = PrimaryScope(p_min=run[0], p_max=run[-1], mass=mass)
        if best is None or mass > best.mass:
            best = candidate
    assert best is not None
    return best


def span_f1(
    pred_scope: PrimaryScope | GoldScope, gold: GoldScope, grid: PercentageGrid
) -> float:
    """Token-style F1 between the two scopes' grid-point sets."""
    pred_points = set(scope_points(pred_scope.p_min, pred_scope.p_max, grid))
    gold_points = set(scope_points(gold.p_min, gold.p_max, grid))
    overlap = len(pred_points & gold_points)
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_points)
    recall = overlap / len(gold_points)
    return 2 * precision * recall / (precision + recall)


def msd_at_k(pred: RankedPrediction, gold: GoldScope, k: int, beta: Fraction) -> float:
    """Summed distance of out-of-scope top-K points to the nearest gold
    endpoint, normalized by B_m = p_max - p_min + beta. Zero iff every
    top-K point lies inside the gold scope."""
    _check_gold(pred, gold)
    b_m = gold.p_max - gold.p_min + beta
    total = Fraction(0)
    for p in pred.top(k):
        if gold.p_min <= p <= gold.p_max:
            continue
        total += max(gold.p_min - p, p - gold.p_max) / b_m
    return float(total)
