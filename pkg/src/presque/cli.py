"""Command-line surface.

    presque [global flags] infer --sentence ... --span START:END
    presque [global flags] eval DATASET
    presque [global flags] compare-human HVD_DATASET HUMAN_CSV
    presque [global flags] ground EXPRESSION
    presque [global flags] convert --kind {qure-csv,hvd-csv} SRC DEST

Exit codes: 2 usage, 3 scorer failure, 4 validation.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import click

from .config import RunConfig, load_config
from .datasets import (
    convert_hvd_csv,
    convert_qure_csv,
    load_human_interpretation,
    load_hvd,
    load_qure,
)
from .grid import as_fraction, make_grid
from .grounding import GroundingConfig, ground, parse_expression
from .metrics import RankedPrediction, hvd_cross_entropy, primary_scope
from .reporting import (
    aggregate_rows,
    distribution_bars_csv,
    evaluate_records,
    write_aggregates_csv,
    write_records_csv,
    write_report_json,
)
from .rsa import QuantifierPrior, aggregate_listener, listener
from .scorer import (
    BackendUnavailable,
    CachingScorer,
    MockScorer,
    ProtocolError,
    RemoteScorer,
    ScoreCache,
)
from .templating import QuantifiedRecord, render_hvd

EXIT_SCORER = 3
EXIT_VALIDATION = 4


class ValidationFailure(click.ClickException):
    exit_code = EXIT_VALIDATION


class ScorerFailure(click.ClickException):
    exit_code = EXIT_SCORER


def _build_scorer(cfg: RunConfig):
    if cfg.scorer_kind == "mock":
        base = MockScorer.from_json(cfg.mock_table) if cfg.mock_table else MockScorer()
    elif cfg.scorer_kind == "remote":
        url = cfg.resolved_scorer_url()
        if not url:
            raise ValidationFailure(
                "remote scorer selected but no URL given (--scorer-url or PRESQUE_SCORER_URL)"
            )
        base = RemoteScorer(
            url, batch_size=cfg.scorer_batch_size, parallelism=cfg.scorer_parallelism
        )
    else:
        raise ValidationFailure(f"unknown scorer kind {cfg.scorer_kind!r}")
    if cfg.cache_path is not None:
        return CachingScorer(base, ScoreCache(cfg.cache_path))
    return base


def _build_prior(cfg: RunConfig) -> QuantifierPrior:
    inventory = cfg.inventory()
    try:
        if cfg.prior_path is not None:
            return QuantifierPrior.from_file(cfg.prior_path, inventory)
        return QuantifierPrior.from_frequencies(inventory)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc


def _guard(fn, *args, **kwargs):
    """Run an engine call, mapping failures to the documented exit codes."""
    try:
        return fn(*args, **kwargs)
    except (BackendUnavailable, ProtocolError) as exc:
        raise ScorerFailure(str(exc)) from exc
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config file; flags override it.")
@click.option("--beta", default=None, help="Grid interval width (e.g. 0.05).")
@click.option("--granularity", default=None, help="Grounding granularity g.")
@click.option("--window", type=int, default=None, help="Grounding window size w.")
@click.option("--k", type=int, default=None, help="Top-K for F1/MSD/consecutiveness.")
@click.option("--seed", type=int, default=None, help="Random-baseline base seed.")
@click.option("--scorer", "scorer_kind", type=click.Choice(["mock", "remote"]), default=None)
@click.option("--scorer-url", default=None, help="Remote scorer base URL.")
@click.option("--mock-table", type=click.Path(exists=True), default=None,
              help="JSON table backing the mock scorer.")
@click.option("--prior", "prior_path", type=click.Path(exists=True), default=None,
              help="Two-column `lexeme weight` prior override file.")
@click.option("--cache", "cache_path", type=click.Path(), default=None,
              help="Append-only entailment score cache file.")
@click.option("--jobs", type=int, default=None, help="Per-record evaluation threads.")
@click.option("--out", type=click.Path(), default=None, help="Output directory.")
@click.pass_context
def main(ctx, config_path, beta, granularity, window, k, seed, scorer_kind,
         scorer_url, mock_table, prior_path, cache_path, jobs, out):
    """Percentage-scope interpretation of generalized quantifiers."""
    try:
        cfg = load_config(config_path)
        updates: dict = {}
        if beta is not None:
            updates["beta"] = as_fraction(beta)
        if granularity is not None:
            updates["granularity"] = as_fraction(granularity)
        if window is not None:
            updates["window"] = window
        if k is not None:
            updates["k"] = k
        if seed is not None:
            updates["seed"] = seed
        if scorer_kind is not None:
            updates["scorer_kind"] = scorer_kind
        if scorer_url is not None:
            updates["scorer_url"] = scorer_url
        if mock_table is not None:
            updates["mock_table"] = Path(mock_table)
        if prior_path is not None:
            updates["prior_path"] = Path(prior_path)
        if cache_path is not None:
            updates["cache_path"] = Path(cache_path)
        if jobs is not None:
            updates["jobs"] = jobs
        cfg = replace(cfg, **updates)
    except (ValueError, OSError) as exc:
        raise ValidationFailure(str(exc)) from exc
    ctx.obj = {"cfg": cfg, "out": Path(out) if out else None}


def _out_dir(ctx) -> Path:
    out = ctx.obj["out"] or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_span(span: str) -> tuple[int, int]:
    try:
        start, end = span.replace(":", " ").split()
        return int(start), int(end)
    except ValueError:
        raise click.UsageError(f"--span must be START:END, got {span!r}")


@main.command()
@click.option("--sentence", required=True, help="The quantified sentence.")
@click.option("--span", required=True, help="Quantifier span as START:END character offsets.")
@click.option("--quantifier", default=None,
              help="Quantifier lexeme; defaults to the lowercased span text.")
@click.pass_context
def infer(ctx, sentence, span, quantifier):
    """Percentage-scope report for a single sentence."""
    cfg: RunConfig = ctx.obj["cfg"]
    start, end = _parse_span(span)
    lexeme = (quantifier or sentence[start:end]).strip().lower()
    if lexeme == "no":
        lexeme = "none"
    inventory = cfg.inventory()
    if lexeme not in inventory:
        raise ValidationFailure(f"quantifier {lexeme!r} not in inventory")
    try:
        rec = QuantifiedRecord(
            text=sentence, quantifier=lexeme, quantifier_span=(start, end), source_id="cli"
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc

    grid = _guard(make_grid, cfg.beta)
    scorer = _guard(_build_scorer, cfg)
    qprior = _build_prior(cfg)
    k = min(cfg.k, len(grid.points))
    report: dict = {"sentence": sentence, "quantifier": lexeme, "k": k}
    for kind in ("L0", "L1"):
        dist = _guard(listener, rec, grid, kind, scorer, qprior)
        pred = RankedPrediction.from_scores(dist.scores, grid)
        scope = primary_scope(pred, k)
        normalized = dist.normalize().scores
        report[kind] = {
            "scores": {str(float(p)): dist.scores[p] for p in grid.points},
            "normalized": {str(float(p)): normalized[p] for p in grid.points},
            "top": [str(float(p)) for p in pred.top(k)],
            "primary_scope": {
                "p_min": str(float(scope.p_min)),
                "p_max": str(float(scope.p_max)),
                "mass": scope.mass,
            },
        }
        click.echo(f"{kind}: top-{k} {' '.join(report[kind]['top'])}  "
                   f"primary scope [{report[kind]['primary_scope']['p_min']}, "
                   f"{report[kind]['primary_scope']['p_max']}]")
    if ctx.obj["out"] is not None:
        path = _out_dir(ctx) / "infer.json"
        path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote {path}")


@main.command(name="eval")
@click.argument("dataset", type=click.Path(exists=True))
@click.pass_context
def eval_cmd(ctx, dataset):
    """Evaluate listeners and the random baseline on a scope-annotated dataset."""
    cfg: RunConfig = ctx.obj["cfg"]
    grid = _guard(make_grid, cfg.beta)
    grounding_cfg = _guard(GroundingConfig, granularity=cfg.granularity, window=cfg.window)
    qure = _guard(load_qure, dataset, grid, grounding_cfg, cfg.inventory())
    scorer = _guard(_build_scorer, cfg)
    qprior = _build_prior(cfg)
    missing = sorted({r.quantifier for r in qure.records} - set(qprior.weights))
    if missing:
        raise ValidationFailure(f"dataset quantifiers missing from prior: {missing}")
    rows = _guard(
        evaluate_records, qure, scorer, qprior, cfg.k, cfg.seed, jobs=cfg.jobs
    )
    k = min(cfg.k, len(grid.points))
    aggregates = aggregate_rows(rows, k)
    out = _out_dir(ctx)
    write_records_csv(rows, k, out / "records.csv")
    write_aggregates_csv(aggregates, k, out / "aggregates.csv")
    write_report_json(
        rows,
        aggregates,
        run_params={
            "beta": str(grid.beta),
            "granularity": str(qure.grounding.granularity),
            "window": qure.grounding.window,
            "k": k,
            "seed": cfg.seed,
            "records": len(qure.records),
        },
        path=out / "report.json",
    )
    for entry in aggregates:
        if entry["specificity"] == "total":
            click.echo(
                f"{entry['listener']}: hit@1 {entry['hit@1']:.3f}  mrr {entry['mrr']:.3f}  "
                f"ce {entry['ce']:.3f}  f1@{k} {entry[f'f1@{k}']:.3f}"
            )
    click.echo(f"wrote {out / 'records.csv'}, {out / 'aggregates.csv'}, {out / 'report.json'}")


@main.command(name="compare-human")
@click.argument("hvd_dataset", type=click.Path(exists=True))
@click.argument("human_csv", type=click.Path(exists=True))
@click.pass_context
def compare_human(ctx, hvd_dataset, human_csv):
    """Cross-entropy of aggregated listener interpretations against human ones."""
    cfg: RunConfig = ctx.obj["cfg"]
    grid = _guard(make_grid, cfg.beta)
    inventory = cfg.inventory()
    hvd = _guard(load_hvd, hvd_dataset, inventory)
    human = _guard(load_human_interpretation, human_csv, grid, inventory)
    records = [render_hvd(t) for t in hvd.triples]
    scorer = _guard(_build_scorer, cfg)
    qprior = _build_prior(cfg)
    bars: dict = {"human": human.per_quantifier}
    summary: dict = {"beta": str(grid.beta), "cross_entropy": {}, "missing": {}}
    for kind in ("L0", "L1"):
        agg = _guard(aggregate_listener, records, grid, kind, scorer, qprior, inventory)
        ce = _guard(hvd_cross_entropy, human, agg.per_quantifier)
        summary["cross_entropy"][kind] = ce
        summary["missing"][kind] = list(agg.missing)
        bars[kind] = {q: d.scores for q, d in agg.per_quantifier.items()}
        click.echo(f"{kind}: cross-entropy {ce:.4f}")
    out = _out_dir(ctx)
    distribution_bars_csv(bars, grid, out / "interpretation_bars.csv")
    (out / "human_compare.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    click.echo(f"wrote {out / 'interpretation_bars.csv'}, {out / 'human_compare.json'}")


@main.command(name="ground")
@click.argument("expression")
@click.pass_context
def ground_cmd(ctx, expression):
    """Ground a percentage expression to its gold scope on the grid."""
    cfg: RunConfig = ctx.obj["cfg"]
    grid = _guard(make_grid, cfg.beta)
    grounding_cfg = _guard(GroundingConfig, granularity=cfg.granularity, window=cfg.window)
    expr = _guard(parse_expression, expression)
    scope = _guard(ground, expr, grounding_cfg, grid)
    click.echo(f"[{float(scope.p_min)}, {float(scope.p_max)}]")


@main.command()
@click.option("--kind", type=click.Choice(["qure-csv", "hvd-csv"]), required=True)
@click.argument("src", type=click.Path(exists=True))
@click.argument("dest", type=click.Path())
@click.pass_context
def convert(ctx, kind, src, dest):
    """Convert an external dataset rendering to the internal JSONL format."""
    converter = convert_qure_csv if kind == "qure-csv" else convert_hvd_csv
    count = _guard(converter, src, dest)
    click.echo(f"wrote {count} record(s) to {dest}")


if __name__ == "__main__":
    main()
