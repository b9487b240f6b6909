"""Loading and validation of scope-annotated and triple datasets.

Internal formats are line-delimited JSON (spans survive JSONL intact,
unlike CSV quoting):

  scope records   {"id", "text", "quantifier", "span": [start, end],
                   "expression", "specificity", "source_entity"}
                  optionally preceded by a header line
                  {"header": {"beta": "0.05", "granularity": "0.01", "window": 2}}

  triple records  {"concept", "feature", "labels": ["all", "all", "most"]}

  human rows      CSV `lexeme,scope,count` where scope is a point ("0.3")
                  or a pair ("0.1-0.3"); a scope vote adds its count to
                  every grid point it covers, then rows normalize per
                  lexeme.

A converter accepts external CSV/JSON renderings of the same data.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .grid import PercentageGrid, QuantifierInventory, as_fraction, make_grid
from .grounding import GoldScope, GroundingConfig, ground, parse_expression
from .metrics import HumanInterpretation
from .templating import (
    SPECIFICITY_LEVELS,
    HvdTriple,
    QuantifiedRecord,
    render_quantifier,
)

logger = logging.getLogger(__name__)

# Annotation exports spell levels several ways; records store the canonical one.
_SPECIFICITY_ALIASES = {
    "full": "full",
    "fully": "full",
    "partial": "partial",
    "partially": "partial",
    "indeterminable": "indeterminable",
}

# Triple labels use "no" where the inventory lexeme is "none".
_LABEL_ALIASES = {"no": "none"}


class ParseError(ValueError):
    """Malformed file content; message carries the line number."""


class ValidationError(ValueError):
    """Structurally parseable records that violate dataset invariants."""


class UnknownQuantifier(ValueError):
    """A lexeme outside the active inventory."""


@dataclass(frozen=True)
class QuReFile:
    """Scope-annotated records plus their grid-grounded gold scopes.

    flagged lists records whose span sits right after an indefinite
    article ("a large amount"), where a percentage splice produces a
    double determiner; they still load, but warrant manual review.
    """

    records: tuple[QuantifiedRecord, ...]
    scopes: Mapping[str, GoldScope]
    grid: PercentageGrid
    grounding: GroundingConfig
    flagged: tuple[str, ...] = ()


@dataclass(frozen=True)
class HvdFile:
    """Majority-labeled triples; ties resolve to the first listed label."""

    triples: tuple[HvdTriple, ...]
    labels: tuple[tuple[str, ...], ...]
    ties: tuple[str, ...]


def _majority(labels: Sequence[str]) -> tuple[str, bool]:
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    best = max(counts.values())
    winners = [label for label in labels if counts[label] == best]
    return winners[0], len(set(winners)) > 1


def _parse_lines(path: Path) -> list[tuple[int, dict]]:
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"{path}:{lineno}: expected a JSON object")
        rows.append((lineno, obj))
    return rows


def load_qure(
    path: str | Path,
    grid: PercentageGrid | None = None,
    grounding_cfg: GroundingConfig | None = None,
    inventory: QuantifierInventory | None = None,
) -> QuReFile:
    """Load scope-annotated records, grounding each expression at load time.

    Explicit grid/grounding arguments win over the file header; the header
    wins over the built-in defaults (beta 0.05, g 0.01, w 2).
    """
    path = Path(path)
    inventory = inventory or QuantifierInventory()
    rows = _parse_lines(path)
    header: dict = {}
    if rows and "header" in rows[0][1]:
        header = rows[0][1]["header"]
        rows = rows[1:]
    if grid is None:
        grid = make_grid(header.get("beta", "0.05"))
    if grounding_cfg is None:
        grounding_cfg = GroundingConfig(
            granularity=as_fraction(header.get("granularity", "0.01")),
            window=int(header.get("window", 2)),
        )

    records: list[QuantifiedRecord] = []
    scopes: dict[str, GoldScope] = {}
    flagged: list[str] = []
    problems: list[str] = []
    for lineno, row in rows:
        try:
            missing = [k for k in ("id", "text", "quantifier", "span", "expression", "specificity") if k not in row]
            if missing:
                raise ParseError(f"{path}:{lineno}: missing fields {missing}")
            specificity = _SPECIFICITY_ALIASES.get(str(row["specificity"]).lower())
            if specificity is None:
                raise ValidationError(
                    f"{path}:{lineno}: specificity must be one of {SPECIFICITY_LEVELS}, "
                    f"got {row['specificity']!r}"
                )
            quantifier = str(row["quantifier"]).lower()
            if quantifier not in inventory:
                raise UnknownQuantifier(f"{path}:{lineno}: {quantifier!r} not in inventory")
            span = tuple(int(x) for x in row["span"])
            if len(span) != 2:
                raise ParseError(f"{path}:{lineno}: span must be [start, end]")
            text = str(row["text"])
            span_text = text[span[0] : span[1]].lower()
            # accept the sentence surface form too ("No ..." for "none")
            if quantifier not in span_text and render_quantifier(quantifier, False) not in span_text:
                raise ValidationError(
                    f"{path}:{lineno}: span text {text[span[0]:span[1]]!r} "
                    f"does not contain quantifier {quantifier!r}"
                )
            expression = parse_expression(str(row["expression"]))
            record = QuantifiedRecord(
                text=text,
                quantifier=quantifier,
                quantifier_span=(span[0], span[1]),
                gold_expression=expression,
                specificity=specificity,
                source_id=str(row["id"]),
            )
            if record.source_id in scopes:
                raise ValidationError(f"{path}:{lineno}: duplicate record id {record.source_id!r}")
            if re.search(r"\ban?\s+$", text[: span[0]], re.IGNORECASE):
                logger.warning(
                    "record %s: span follows an indefinite article; percentage "
                    "substitution will read oddly, review manually", record.source_id
                )
                flagged.append(record.source_id)
            scopes[record.source_id] = ground(expression, grounding_cfg, grid)
            records.append(record)
        except ValueError as exc:
            problems.append(str(exc))
    if problems:
        raise ValidationError(f"{len(problems)} invalid record(s):\n" + "\n".join(problems))
    if not records:
        logger.warning("no records loaded from %s", path)
    return QuReFile(
        records=tuple(records),
        scopes=scopes,
        grid=grid,
        grounding=grounding_cfg,
        flagged=tuple(flagged),
    )


def load_hvd(path: str | Path, inventory: QuantifierInventory | None = None) -> HvdFile:
    """Load triples with per-annotator labels, majority-voted per triple."""
    path = Path(path)
    inventory = inventory or QuantifierInventory()
    triples: list[HvdTriple] = []
    all_labels: list[tuple[str, ...]] = []
    ties: list[str] = []
    for lineno, row in _parse_lines(path):
        missing = [k for k in ("concept", "feature", "labels") if k not in row]
        if missing:
            raise ParseError(f"{path}:{lineno}: missing fields {missing}")
        raw_labels = row["labels"]
        if not isinstance(raw_labels, list) or not raw_labels:
            raise ValidationError(f"{path}:{lineno}: labels must be a non-empty list")
        labels = tuple(_LABEL_ALIASES.get(str(l).lower(), str(l).lower()) for l in raw_labels)
        for label in labels:
            if label not in inventory:
                raise UnknownQuantifier(f"{path}:{lineno}: label {label!r} not in inventory")
        majority, tied = _majority(labels)
        key = f"{row['concept']}/{row['feature']}"
        if tied:
            logger.warning("label tie for %s: %s; keeping %r", key, labels, majority)
            ties.append(key)
        triples.append(
            HvdTriple(concept=str(row["concept"]), feature=str(row["feature"]), quantifier=majority)
        )
        all_labels.append(labels)
    return HvdFile(triples=tuple(triples), labels=tuple(all_labels), ties=tuple(ties))


def load_human_interpretation(
    path: str | Path,
    grid: PercentageGrid,
    inventory: QuantifierInventory | None = None,
) -> HumanInterpretation:
    """Load annotator scope votes and spread them into per-point counts.

    A vote for a scope adds its count to every grid point the scope covers;
    lexemes with no rows are absent from the result (absence is not a
    uniform belief).
    """
    path = Path(path)
    inventory = inventory or QuantifierInventory()
    counts: dict[str, dict[Fraction, float]] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if row[0].startswith("#"):
                declared = re.match(r"#\s*beta\s*=\s*(\S+)", row[0])
                if declared and as_fraction(declared.group(1)) != grid.beta:
                    raise ValidationError(
                        f"{path}:{lineno}: file declares beta={declared.group(1)}, "
                        f"active grid has beta={grid.beta}"
                    )
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected `lexeme,scope,count`")
            lexeme = row[0].strip().lower()
            lexeme = _LABEL_ALIASES.get(lexeme, lexeme)
            if lexeme not in inventory:
                raise UnknownQuantifier(f"{path}:{lineno}: {lexeme!r} not in inventory")
            try:
                parts = [as_fraction(v) for v in row[1].split("-")]
                count = float(row[2])
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if len(parts) == 1:
                lo = hi = parts[0]
            elif len(parts) == 2:
                lo, hi = parts
            else:
                raise ParseError(f"{path}:{lineno}: scope must be `p` or `lo-hi`")
            if lo > hi or lo not in grid or hi not in grid:
                raise ParseError(f"{path}:{lineno}: scope [{lo}, {hi}] not on the grid")
            if count <= 0:
                raise ParseError(f"{path}:{lineno}: count must be positive")
            per = counts.setdefault(lexeme, {p: 0.0 for p in grid.points})
            for p in grid.points:
                if lo <= p <= hi:
                    per[p] += count
    normalized = {}
    for lexeme in sorted(counts):
        total = sum(counts[lexeme].values())
        normalized[lexeme] = {p: c / total for p, c in counts[lexeme].items()}
    return HumanInterpretation(per_quantifier=normalized)


def write_qure(qure: QuReFile, path: str | Path) -> None:
    """Serialize back to the internal JSONL format (round-trips with load_qure)."""
    path = Path(path)
    lines = [
        json.dumps(
            {
                "header": {
                    "beta": str(qure.grid.beta),
                    "granularity": str(qure.grounding.granularity),
                    "window": qure.grounding.window,
                }
            },
            sort_keys=True,
        )
    ]
    for rec in qure.records:
        expr = rec.gold_expression
        assert expr is not None
        lines.append(
            json.dumps(
                {
                    "id": rec.source_id,
                    "text": rec.text,
                    "quantifier": rec.quantifier,
                    "span": list(rec.quantifier_span),
                    "expression": serialize_expression(expr),
                    "specificity": rec.specificity,
                    "source_entity": "",
                },
                ensure_ascii=False,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_OP_PREFIXES = {"gt": ">", "geq": ">=", "lt": "<", "leq": "<=", "approx": "~"}


def serialize_expression(expr) -> str:
    """Inverse of parse_expression."""
    def fmt(v: Fraction) -> str:
        f = float(v)
        return str(int(f)) if f.is_integer() else repr(f)

    if expr.op == "exact":
        return fmt(expr.value)
    if expr.op == "range":
        return f"{fmt(expr.value)}-{fmt(expr.value_hi)}"
    return f"{_OP_PREFIXES[expr.op]}{fmt(expr.value)}"


def convert_qure_csv(src: str | Path, dest: str | Path) -> int:
    """Convert an external CSV rendering (columns id,text,quantifier,
    span_start,span_end,expression,specificity[,source_entity]) to JSONL.
    Returns the number of converted records."""
    src, dest = Path(src), Path(dest)
    lines = []
    with src.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for i, row in enumerate(reader, start=2):
            try:
                lines.append(
                    json.dumps(
                        {
                            "id": row["id"],
                            "text": row["text"],
                            "quantifier": row["quantifier"].lower(),
                            "span": [int(row["span_start"]), int(row["span_end"])],
                            "expression": row["expression"],
                            "specificity": row["specificity"].lower(),
                            "source_entity": row.get("source_entity", ""),
                        },
                        ensure_ascii=False,
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ParseError(f"{src}:{i}: {exc}") from exc
    dest.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return len(lines)


def convert_hvd_csv(src: str | Path, dest: str | Path) -> int:
    """Convert an external CSV rendering (columns concept,feature,labels
    with labels pipe-separated) to JSONL. Returns the record count."""
    src, dest = Path(src), Path(dest)
    lines = []
    with src.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for i, row in enumerate(reader, start=2):
            try:
                labels = [l.strip() for l in row["labels"].split("|") if l.strip()]
                lines.append(
                    json.dumps(
                        {"concept": row["concept"], "feature": row["feature"], "labels": labels},
                        ensure_ascii=False,
                    )
                )
            except KeyError as exc:
                raise ParseError(f"{src}:{i}: missing column {exc}") from exc
    dest.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return len(lines)
