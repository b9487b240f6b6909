"""Hand-buildable mock configurations plus an independent brute-force
reference for the pragmatic listener.

Everything here is deliberately self-contained: sentences are assembled
with f-strings (not the package's templating helpers) and the reference
computation below is straight-line arithmetic over the mock table, so it
can disagree with the engine if the engine is wrong.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from presque.grid import PercentageGrid, make_grid
from presque.rsa import QuantifierPrior
from presque.scorer import EntailmentResult, MockScorer
from presque.templating import QuantifiedRecord

# Grid sizes whose points are all integral percents, keeping the mock keys
# trivial to write down.
GRID_SIZES = {2: Fraction(1), 3: Fraction(1, 2), 5: Fraction(1, 4)}

LEXEME_POOL = ("some", "most", "few")


def sentence_for(lexeme: str) -> str:
    return f"{lexeme.capitalize()} apples are red."


def percent_sentence(p: Fraction) -> str:
    return f"{int(p * 100)}% apples are red."


@dataclass
class RsaFixture:
    record: QuantifiedRecord
    grid: PercentageGrid
    lexemes: tuple[str, ...]
    weights: dict[str, float]
    entail: dict[tuple[str, str], float]

    @property
    def points(self) -> tuple[Fraction, ...]:
        return self.grid.points

    def scorer(self) -> MockScorer:
        table = {
            pair: EntailmentResult(e, (1 - e) / 2, (1 - e) / 2)
            for pair, e in self.entail.items()
        }
        return MockScorer(table)

    def prior_arg(self) -> QuantifierPrior:
        return QuantifierPrior(weights=self.weights)


def make_fixture(
    n_points: int,
    n_lexemes: int,
    seed: int,
    entail_override=None,
) -> RsaFixture:
    """A complete mock configuration: every (premise, hypothesis) pair the
    listener computations can touch is assigned a value.

    entail_override(kind, lexeme_or_none, point) may pin specific values;
    kind is "listener" for quantifier->percentage pairs and "speaker" for
    the swapped direction.
    """
    rng = random.Random(seed * 1000 + n_points * 10 + n_lexemes)
    grid = make_grid(GRID_SIZES[n_points])
    lexemes = LEXEME_POOL[:n_lexemes]
    record = QuantifiedRecord(
        text=sentence_for("some"), quantifier="some", quantifier_span=(0, 4), source_id="fixture"
    )

    def value(kind, lexeme, point):
        if entail_override is not None:
            pinned = entail_override(kind, lexeme, point)
            if pinned is not None:
                return pinned
        return rng.uniform(0.05, 0.95)

    entail: dict[tuple[str, str], float] = {}
    for q in lexemes:
        for p in grid.points:
            entail[(sentence_for(q), percent_sentence(p))] = value("listener", q, p)
    for p in grid.points:
        entail[(percent_sentence(p), record.text)] = value("speaker", None, p)

    raw_weights = {q: rng.uniform(0.2, 1.0) for q in lexemes}
    total = sum(raw_weights.values())
    weights = {q: w / total for q, w in raw_weights.items()}
    return RsaFixture(record=record, grid=grid, lexemes=lexemes, weights=weights, entail=entail)


def reference_prior(fix: RsaFixture) -> dict[Fraction, float]:
    """Mixture of per-lexeme normalized percentage curves, renormalized."""
    prior = {}
    for p in fix.points:
        acc = 0.0
        for q in fix.lexemes:
            z = sum(fix.entail[(sentence_for(q), percent_sentence(pp))] for pp in fix.points)
            acc += fix.weights[q] * fix.entail[(sentence_for(q), percent_sentence(p))] / z
        prior[p] = acc
    z = sum(prior.values())
    return {p: v / z for p, v in prior.items()}


def reference_l1(fix: RsaFixture) -> dict[Fraction, float]:
    """Speaker score times prior, normalized: the pragmatic listener."""
    prior = reference_prior(fix)
    raw = {
        p: fix.entail[(percent_sentence(p), fix.record.text)] * prior[p] for p in fix.points
    }
    z = sum(raw.values())
    return {p: v / z for p, v in raw.items()}


def sweep_fixtures() -> list[RsaFixture]:
    """The fixed fixture set: every grid size x inventory size x three seeds."""
    return [
        make_fixture(n_points, n_lexemes, seed)
        for n_points in sorted(GRID_SIZES)
        for n_lexemes in (1, 2, 3)
        for seed in (0, 1, 2)
    ]
