"""A three-record toy dataset whose mock entailment table is generated by a
fixed formula, so every evaluation quantity is reproducible and checkable
by independent arithmetic."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

TOY_INVENTORY = ("some", "few", "most")
TOY_BETA = "0.5"
TOY_POINTS = (Fraction(0), Fraction(1, 2), Fraction(1))

# (id, subject phrase, quantifier, specificity, expression)
TOY_ROWS = (
    ("r1", "apples are red", "some", "indeterminable", "~0.3"),
    ("r2", "tomatoes are green", "few", "partial", "0.04"),
    ("r3", "owls live in forests", "most", "full", "0.8-0.9"),
)


def quantified_sentence(lexeme: str, subject: str) -> str:
    return f"{lexeme.capitalize()} {subject}."


def percent_sentence(p: Fraction, subject: str) -> str:
    return f"{int(p * 100)}% {subject}."


def toy_entail(i: int, j: int, k: int, speaker: bool) -> float:
    """Deterministic, varied, strictly positive mock value."""
    base = (3 * i + 5 * j + 7 * k + (11 if speaker else 0)) % 13
    return 0.05 + 0.9 * (base / 12)


def build_table() -> dict[tuple[str, str], float]:
    table: dict[tuple[str, str], float] = {}
    for i, (_, subject, _, _, _) in enumerate(TOY_ROWS):
        for j, lexeme in enumerate(TOY_INVENTORY):
            for k, p in enumerate(TOY_POINTS):
                table[(quantified_sentence(lexeme, subject), percent_sentence(p, subject))] = (
                    toy_entail(i, j, k, speaker=False)
                )
        own = quantified_sentence(TOY_ROWS[i][2], subject)
        for k, p in enumerate(TOY_POINTS):
            table[(percent_sentence(p, subject), own)] = toy_entail(i, 0, k, speaker=True)
    return table


def write_mock_table(path: Path) -> Path:
    rows = [
        {"premise": p, "hypothesis": h, "entail": e, "neutral": (1 - e) / 2,
         "contradict": (1 - e) / 2}
        for (p, h), e in sorted(build_table().items())
    ]
    path.write_text(json.dumps(rows, indent=1), encoding="utf-8")
    return path


def write_dataset(path: Path) -> Path:
    lines = []
    for rec_id, subject, lexeme, specificity, expression in TOY_ROWS:
        text = quantified_sentence(lexeme, subject)
        lines.append(
            json.dumps(
                {
                    "id": rec_id,
                    "text": text,
                    "quantifier": lexeme,
                    "span": [0, len(lexeme)],
                    "expression": expression,
                    "specificity": specificity,
                    "source_entity": subject,
                }
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_config(path: Path) -> Path:
    path.write_text(
        "grid:\n"
        f"  beta: \"{TOY_BETA}\"\n"
        "inventory:\n"
        "  quantifiers: [some, few, most]\n",
        encoding="utf-8",
    )
    return path
