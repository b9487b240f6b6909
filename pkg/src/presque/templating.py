"""Sentence rewrites: percentage/quantifier substitution and triple rendering.

A QuantifiedRecord pins down one quantifier occurrence in a sentence by a
character span. Hypothesis sentences are produced by splicing a rendered
percentage (or another quantifier lexeme) into that span; everything
outside the span stays byte-identical, which keeps entailment queries
minimal pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .grounding import PercentageExpression

SPECIFICITY_LEVELS = ("full", "partial", "indeterminable")

# Lexemes whose surface form differs in sentence position.
_SENTENCE_FORMS = {"none": "no"}

# Sibilant-final nouns take -es; everything else gets a bare -s unless the
# noun is irregular.
_IRREGULAR_PLURALS = {
    "child": "children",
    "foot": "feet",
    "goose": "geese",
    "man": "men",
    "mouse": "mice",
    "person": "people",
    "sheep": "sheep",
    "tooth": "teeth",
    "woman": "women",
}
_SIBILANT_SUFFIXES = ("s", "x", "z", "ch", "sh")

# Leading feature-verb rewrites for plural subjects.
_FEATURE_VERB_REWRITES = {"has": "have", "is": "are", "used": "are used"}


class SpanOutOfBounds(ValueError):
    """Raised when a quantifier span does not fit inside the record text."""


@dataclass(frozen=True)
class QuantifiedRecord:
    """A sentence with one annotated quantifier occurrence.

    gold_expression and specificity are populated for scope-annotated
    records and absent for triple-derived ones.
    """

    text: str
    quantifier: str
    quantifier_span: tuple[int, int]
    gold_expression: PercentageExpression | None = None
    specificity: str | None = None
    source_id: str = ""

    def __post_init__(self) -> None:
        if self.specificity is not None and self.specificity not in SPECIFICITY_LEVELS:
            raise ValueError(f"unknown specificity {self.specificity!r}")

    @property
    def span_text(self) -> str:
        start, end = self.quantifier_span
        return self.text[start:end]


@dataclass(frozen=True)
class HvdTriple:
    """A <concept, feature, quantifier> judgment about how often a predicate holds."""

    concept: str
    feature: str
    quantifier: str

    def __post_init__(self) -> None:
        if not (self.concept and self.feature and self.quantifier):
            raise ValueError("triple fields must be non-empty")


def _check_span(rec: QuantifiedRecord) -> tuple[int, int]:
    start, end = rec.quantifier_span
    if not (0 <= start < end <= len(rec.text)):
        raise SpanOutOfBounds(f"span {rec.quantifier_span} outside text of length {len(rec.text)}")
    return start, end


def _splice(rec: QuantifiedRecord, replacement: str) -> str:
    start, end = _check_span(rec)
    return rec.text[:start] + replacement + rec.text[end:]


def render_percentage(p: Fraction | float) -> str:
    """Render a proportion as a percent string: integer when exact, else one decimal."""
    hundred = Fraction(p) * 100 if isinstance(p, Fraction) else Fraction(repr(float(p))) * 100
    if hundred.denominator == 1:
        return f"{int(hundred)}%"
    return f"{float(hundred):.1f}%"


def render_quantifier(q: str, capitalize: bool) -> str:
    """Surface form of a lexeme in sentence position ("none" surfaces as "no")."""
    word = _SENTENCE_FORMS.get(q, q)
    if capitalize:
        return word[0].upper() + word[1:]
    return word


def substitute_percentage(rec: QuantifiedRecord, p: Fraction | float) -> str:
    """Replace the quantifier span with a rendered percentage value."""
    return _splice(rec, render_percentage(p))


def substitute_quantifier(rec: QuantifiedRecord, q: str) -> str:
    """Replace the quantifier span with another lexeme, matching the
    original span's leading capitalization."""
    start, _ = _check_span(rec)
    capitalize = rec.text[start].isupper()
    return _splice(rec, render_quantifier(q, capitalize))


def with_quantifier(rec: QuantifiedRecord, q: str) -> QuantifiedRecord:
    """Record for the same sentence rewritten with lexeme q (span tracked)."""
    start, _ = _check_span(rec)
    rendered = render_quantifier(q, rec.text[start].isupper())
    return replace(
        rec,
        text=_splice(rec, rendered),
        quantifier=q,
        quantifier_span=(start, start + len(rendered)),
    )


def pluralize(noun: str) -> str:
    if noun in _IRREGULAR_PLURALS:
        return _IRREGULAR_PLURALS[noun]
    if noun.endswith(_SIBILANT_SUFFIXES):
        return noun + "es"
    return noun + "s"


def _feature_words(feature: str) -> str:
    words = feature.split("_")
    head, rest = words[0], words[1:]
    rewritten = _FEATURE_VERB_REWRITES.get(head, head)
    return " ".join([rewritten, *rest]) if rest else rewritten


def render_hvd(triple: HvdTriple) -> QuantifiedRecord:
    """Render a triple as a sentence record: "<Quantifier> <concepts> <feature>."

    The feature's underscore-joined predicate is rewritten for a plural
    subject (has -> have, is -> are, used -> are used); the quantifier span
    covers the leading word.
    """
    lead = render_quantifier(triple.quantifier, capitalize=True)
    sentence = f"{lead} {pluralize(triple.concept)} {_feature_words(triple.feature)}."
    return QuantifiedRecord(
        text=sentence,
        quantifier=triple.quantifier,
        quantifier_span=(0, len(lead)),
        source_id=f"{triple.concept}/{triple.feature}",
    )
