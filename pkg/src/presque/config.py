"""Run configuration: defaults, config-file loading, flag overrides.

Precedence: CLI flags > config file > built-in defaults. The file is YAML
with the sections grid.beta, inventory.quantifiers, grounding.granularity,
grounding.window, scorer.kind/url/batch_size/parallelism, prior, k, seed,
cache.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import yaml

from .grid import QuantifierInventory, as_fraction
from .scorer import SCORER_URL_ENV


@dataclass(frozen=True)
class RunConfig:
    beta: Fraction = Fraction(1, 20)
    granularity: Fraction = Fraction(1, 100)
    window: int = 2
    k: int = 5
    seed: int = 0
    scorer_kind: str = "mock"
    scorer_url: str | None = None
    scorer_batch_size: int = 32
    scorer_parallelism: int = 1
    mock_table: Path | None = None
    prior_path: Path | None = None
    cache_path: Path | None = None
    quantifiers: tuple[str, ...] | None = None
    jobs: int = 1

    def inventory(self) -> QuantifierInventory:
        if self.quantifiers is None:
            return QuantifierInventory()
        return QuantifierInventory(quantifiers=self.quantifiers)

    def resolved_scorer_url(self) -> str | None:
        return self.scorer_url or os.environ.get(SCORER_URL_ENV)


def load_config(path: str | Path | None) -> RunConfig:
    """Build a RunConfig from an optional YAML file."""
    cfg = RunConfig()
    if path is None:
        return cfg
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    grid = data.get("grid", {})
    grounding = data.get("grounding", {})
    scorer = data.get("scorer", {})
    inventory = data.get("inventory", {})
    updates: dict = {}
    if "beta" in grid:
        updates["beta"] = as_fraction(grid["beta"])
    if "granularity" in grounding:
        updates["granularity"] = as_fraction(grounding["granularity"])
    if "window" in grounding:
        updates["window"] = int(grounding["window"])
    if "kind" in scorer:
        updates["scorer_kind"] = str(scorer["kind"])
    if "url" in scorer:
        updates["scorer_url"] = str(scorer["url"])
    if "batch_size" in scorer:
        updates["scorer_batch_size"] = int(scorer["batch_size"])
    if "parallelism" in scorer:
        updates["scorer_parallelism"] = int(scorer["parallelism"])
    if "table" in scorer:
        updates["mock_table"] = Path(scorer["table"])
    if "quantifiers" in inventory:
        updates["quantifiers"] = tuple(str(q) for q in inventory["quantifiers"])
    for key in ("k", "seed", "jobs"):
        if key in data:
            updates[key] = int(data[key])
    if "prior" in data:
        updates["prior_path"] = Path(data["prior"])
    if "cache" in data:
        updates["cache_path"] = Path(data["cache"])
    return replace(cfg, **updates)
