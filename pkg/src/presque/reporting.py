"""Dataset-level evaluation and report serialization.

Reports are plain data, written as CSV and JSON with repr-exact floats and
fixed row order, so identical configurations yield byte-identical files.
No scorer identity, paths, or timestamps appear in report bytes. The
random baseline samples standard-normal scores per grid point, softmaxes
them into a distribution, and averages each metric over a fixed block of
seeds.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .datasets import QuReFile
from .grid import PercentageGrid
from .grounding import GoldScope
from .metrics import (
    RankedPrediction,
    consecutive_at_k,
    cross_entropy_gold,
    hit_at_1,
    mrr,
    msd_at_k,
    primary_scope,
    span_f1,
)
from .rsa import ListenerDistribution, QuantifierPrior, listener
from .scorer import EntailmentScorer
from .templating import QuantifiedRecord

RANDOM_BASELINE_SEEDS = 5
SPECIFICITY_ROWS = ("full", "partial", "indeterminable", "total")


@dataclass(frozen=True)
class MetricRow:
    record_id: str
    listener: str
    quantifier: str
    specificity: str
    values: Mapping[str, float]


def metric_columns(k: int) -> tuple[str, ...]:
    consec = tuple(f"consecutive@{j}" for j in range(3, k + 1))
    # dict.fromkeys dedupes f1@1 when k == 1
    return tuple(dict.fromkeys(("hit@1", "mrr", "ce", "f1@1", f"f1@{k}", f"msd@{k}") + consec))


def score_metrics(
    scores: Mapping[Fraction, float],
    dist_for_ce: ListenerDistribution,
    gold: GoldScope,
    grid: PercentageGrid,
    k: int,
) -> dict[str, float]:
    """All per-record metrics for one score curve against one gold scope."""
    k = min(k, len(grid.points))
    pred = RankedPrediction.from_scores(scores, grid)
    top1 = primary_scope(pred, 1)
    topk = primary_scope(pred, k)
    values: dict[str, float] = {
        "hit@1": float(hit_at_1(pred, gold)),
        "mrr": mrr(pred, gold, grid.beta),
        "ce": cross_entropy_gold(dist_for_ce, gold),
        "f1@1": span_f1(top1, gold, grid),
        f"f1@{k}": span_f1(topk, gold, grid),
        f"msd@{k}": msd_at_k(pred, gold, k, grid.beta),
    }
    for j in range(3, k + 1):
        values[f"consecutive@{j}"] = float(consecutive_at_k(pred, j))
    return values


def listener_metrics(
    rec: QuantifiedRecord,
    gold: GoldScope,
    grid: PercentageGrid,
    kind: str,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior | None,
    k: int,
) -> dict[str, float]:
    dist = listener(rec, grid, kind, scorer, qprior)
    return score_metrics(dist.scores, dist, gold, grid, k)


def random_baseline_metrics(
    rngs: Sequence[np.random.Generator],
    rec: QuantifiedRecord,
    gold: GoldScope,
    grid: PercentageGrid,
    k: int,
) -> dict[str, float]:
    """Mean metrics over one standard-normal softmax draw per seed."""
    per_seed: list[dict[str, float]] = []
    for rng in rngs:
        raw = rng.standard_normal(len(grid.points))
        shifted = np.exp(raw - raw.max())
        probs = shifted / shifted.sum()
        scores = {p: float(v) for p, v in zip(grid.points, probs)}
        dist = ListenerDistribution(
            record_id=rec.source_id, quantifier=rec.quantifier, kind="L0", scores=scores
        )
        per_seed.append(score_metrics(scores, dist, gold, grid, k))
    return {
        name: math.fsum(seed[name] for seed in per_seed) / len(per_seed)
        for name in per_seed[0]
    }


def evaluate_records(
    qure: QuReFile,
    scorer: EntailmentScorer,
    qprior: QuantifierPrior,
    k: int,
    seed: int,
    jobs: int = 1,
) -> list[MetricRow]:
    """Per-record rows for the random baseline, L0, and L1, in file order."""
    grid = qure.grid
    k = min(k, len(grid.points))
    rngs = [np.random.default_rng(seed + i) for i in range(RANDOM_BASELINE_SEEDS)]

    def rows_for(rec: QuantifiedRecord) -> list[MetricRow]:
        gold = qure.scopes[rec.source_id]
        out = []
        for name, values in (
            ("random", random_baseline_metrics(rngs, rec, gold, grid, k)),
            ("L0", listener_metrics(rec, gold, grid, "L0", scorer, None, k)),
            ("L1", listener_metrics(rec, gold, grid, "L1", scorer, qprior, k)),
        ):
            out.append(
                MetricRow(
                    record_id=rec.source_id,
                    listener=name,
                    quantifier=rec.quantifier,
                    specificity=rec.specificity or "",
                    values=values,
                )
            )
        return out

    # The random draws must follow file order regardless of jobs, so they are
    # precomputed here and only the scorer-bound listeners fan out.
    if jobs <= 1:
        nested = [rows_for(rec) for rec in qure.records]
    else:
        randoms = [
            random_baseline_metrics(rngs, rec, qure.scopes[rec.source_id], grid, k)
            for rec in qure.records
        ]

        def scored_rows(item: tuple[QuantifiedRecord, dict[str, float]]) -> list[MetricRow]:
            rec, random_values = item
            gold = qure.scopes[rec.source_id]
            return [
                MetricRow(rec.source_id, "random", rec.quantifier, rec.specificity or "", random_values),
                MetricRow(
                    rec.source_id, "L0", rec.quantifier, rec.specificity or "",
                    listener_metrics(rec, gold, grid, "L0", scorer, None, k),
                ),
                MetricRow(
                    rec.source_id, "L1", rec.quantifier, rec.specificity or "",
                    listener_metrics(rec, gold, grid, "L1", scorer, qprior, k),
                ),
            ]

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            nested = list(pool.map(scored_rows, zip(qure.records, randoms)))
    return [row for group in nested for row in group]


def aggregate_rows(rows: Sequence[MetricRow], k: int) -> list[dict]:
    """Mean of the per-record rows per (listener, specificity), plus totals."""
    columns = metric_columns(k)
    out = []
    for name in ("random", "L0", "L1"):
        for level in SPECIFICITY_ROWS:
            subset = [
                r for r in rows
                if r.listener == name and (level == "total" or r.specificity == level)
            ]
            if not subset:
                continue
            entry: dict = {"listener": name, "specificity": level, "n": len(subset)}
            for col in columns:
                entry[col] = math.fsum(r.values[col] for r in subset) / len(subset)
            out.append(entry)
    return out


def write_records_csv(rows: Sequence[MetricRow], k: int, path: Path) -> None:
    columns = metric_columns(k)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("record_id", "listener", "quantifier", "specificity") + columns)
        for row in rows:
            writer.writerow(
                [row.record_id, row.listener, row.quantifier, row.specificity]
                + [repr(row.values[c]) for c in columns]
            )


def write_aggregates_csv(aggregates: Sequence[dict], k: int, path: Path) -> None:
    columns = metric_columns(k)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("listener", "specificity", "n") + columns)
        for entry in aggregates:
            writer.writerow(
                [entry["listener"], entry["specificity"], entry["n"]]
                + [repr(entry[c]) for c in columns]
            )


def write_report_json(
    rows: Sequence[MetricRow],
    aggregates: Sequence[dict],
    run_params: Mapping[str, object],
    path: Path,
) -> None:
    payload = {
        "run": dict(run_params),
        "records": [
            {
                "record_id": r.record_id,
                "listener": r.listener,
                "quantifier": r.quantifier,
                "specificity": r.specificity,
                **{k: v for k, v in r.values.items()},
            }
            for r in rows
        ],
        "aggregates": list(aggregates),
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def distribution_bars_csv(
    columns: Mapping[str, Mapping[str, Mapping[Fraction, float]]],
    grid: PercentageGrid,
    path: Path,
) -> None:
    """Per-quantifier bar data: one row per (quantifier, grid point).

    columns maps column name (e.g. "human", "L0", "L1") to per-quantifier
    distributions; quantifiers appearing in any column are emitted in
    sorted order with 0.0 for absent cells.
    """
    names = sorted(columns)
    quantifiers = sorted({q for col in columns.values() for q in col})
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["quantifier", "point"] + names)
        for q in quantifiers:
            for p in grid.points:
                row = [q, str(float(p))]
                for name in names:
                    dist = columns[name].get(q, {})
                    row.append(repr(float(dist.get(p, 0.0))))
                writer.writerow(row)
