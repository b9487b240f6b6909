"""Parsing of annotated percentage expressions and grounding to gold scopes.

An expression is one of the serialized forms produced during annotation:

    0.89      exact value
    >0.93     strictly more than
    >=0.45    at least
    <0.01     strictly less than
    <=0.19    at most
    0.24-0.4  closed range
    ~0.98     approximately

Grounding maps an expression to a raw interval with granularity g and
window size w, clips it to [0, 1], resolves open endpoints, and snaps the
result outward to the active percentage grid:

    exact p  -> [p, p]
    > p      -> (p, p + w*g]
    >= p     -> [p, p + w*g]
    < p      -> [p - w*g, p)
    <= p     -> [p - w*g, p]
    p1 - p2  -> [p1, p2]
    ~ p      -> [p - w*g, p + w*g]

Open endpoints cannot live on a closed grid; they are shrunk inward by one
granularity step g before snapping, so "<0.01" at g=0.01 excludes 0.01
itself and grounds to [0, 0].
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .grid import PercentageGrid, as_fraction, snap_outward

OPS = ("exact", "gt", "geq", "lt", "leq", "range", "approx")

_PREFIX_OPS = {">": "gt", ">=": "geq", "<": "lt", "<=": "leq", "~": "approx"}

_EXPR_RE = re.compile(
    r"""^\s*
    (?:(?P<op>>=|<=|>|<|~)\s*)?
    (?P<lo>\d+(?:\.\d+)?(?P<lopct>%)?)
    (?:\s*-\s*(?P<hi>\d+(?:\.\d+)?(?P<hipct>%)?))?
    \s*$""",
    re.VERBOSE,
)


class MalformedExpression(ValueError):
    """Raised for unparseable text, values outside [0, 1], or inverted ranges."""


class EmptyScope(ValueError):
    """Raised when clipping/open-endpoint resolution leaves no interval."""


@dataclass(frozen=True)
class PercentageExpression:
    """A parsed numeric expression: operator plus value(s) in [0, 1]."""

    op: str
    value: Fraction
    value_hi: Fraction | None = None

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise MalformedExpression(f"unknown operator {self.op!r}")
        if (self.value_hi is not None) != (self.op == "range"):
            raise MalformedExpression("value_hi is required for range and forbidden otherwise")
        if not 0 <= self.value <= 1:
            raise MalformedExpression(f"value {self.value} outside [0, 1]")
        if self.value_hi is not None:
            if not 0 <= self.value_hi <= 1:
                raise MalformedExpression(f"value {self.value_hi} outside [0, 1]")
            if self.value > self.value_hi:
                raise MalformedExpression(f"inverted range [{self.value}, {self.value_hi}]")


@dataclass(frozen=True)
class GroundingConfig:
    """Granularity g and window size w controlling inequality/approx width."""

    granularity: Fraction = Fraction(1, 100)
    window: int = 2

    def __post_init__(self) -> None:
        if self.granularity <= 0:
            raise ValueError("granularity must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.window * self.granularity >= 1:
            raise ValueError("window * granularity must be < 1")


@dataclass(frozen=True)
class GoldScope:
    """Grid-snapped interval [p_min, p_max] a sentence's expression denotes."""

    p_min: Fraction
    p_max: Fraction

    def __post_init__(self) -> None:
        if self.p_min > self.p_max:
            raise ValueError(f"p_min {self.p_min} > p_max {self.p_max}")


def _parse_value(token: str, is_pct: bool) -> Fraction:
    v = as_fraction(token.rstrip("%"))
    if is_pct:
        v /= 100
    if not 0 <= v <= 1:
        raise MalformedExpression(f"value {token!r} outside [0, 1]")
    return v


def parse_expression(text: str) -> PercentageExpression:
    """Parse a serialized percentage expression.

    Values written with a trailing % sign are divided by 100.
    """
    m = _EXPR_RE.match(text)
    if m is None:
        raise MalformedExpression(f"cannot parse expression {text!r}")
    lo = _parse_value(m.group("lo"), m.group("lopct") is not None)
    if m.group("hi") is not None:
        if m.group("op") is not None:
            raise MalformedExpression(f"operator and range cannot combine: {text!r}")
        hi = _parse_value(m.group("hi"), m.group("hipct") is not None)
        if lo > hi:
            raise MalformedExpression(f"inverted range in {text!r}")
        return PercentageExpression(op="range", value=lo, value_hi=hi)
    if m.group("op") is not None:
        return PercentageExpression(op=_PREFIX_OPS[m.group("op")], value=lo)
    return PercentageExpression(op="exact", value=lo)


# Raw interval per operator: (lo, lo_open, hi, hi_open) as functions of the
# expression value v and the half-width w*g.
def _raw_interval(
    expr: PercentageExpression, width: Fraction
) -> tuple[Fraction, bool, Fraction, bool]:
    v = expr.value
    if expr.op == "exact":
        return v, False, v, False
    if expr.op == "gt":
        return v, True, v + width, False
    if expr.op == "geq":
        return v, False, v + width, False
    if expr.op == "lt":
        return v - width, False, v, True
    if expr.op == "leq":
        return v - width, False, v, False
    if expr.op == "range":
        assert expr.value_hi is not None
        return v, False, expr.value_hi, False
    if expr.op == "approx":
        return v - width, False, v + width, False
    raise MalformedExpression(f"unknown operator {expr.op!r}")


def ground(
    expr: PercentageExpression, cfg: GroundingConfig, grid: PercentageGrid
) -> GoldScope:
    """Ground an expression to its gold scope on the grid.

    Pipeline: raw interval -> clip to [0, 1] -> shrink open endpoints by one
    granularity step -> snap outward to the grid. Raises EmptyScope when
    clipping plus open-endpoint resolution annihilates the interval (e.g.
    "<0" or ">1" style cases).
    """
    lo, lo_open, hi, hi_open = _raw_interval(expr, cfg.window * cfg.granularity)
    lo = max(lo, Fraction(0))
    hi = min(hi, Fraction(1))
    if lo_open:
        lo += cfg.granularity
    if hi_open:
        hi -= cfg.granularity
    if lo > hi or lo > 1 or hi < 0:
        raise EmptyScope(f"expression {expr} grounds to an empty interval")
    p_min, p_max = snap_outward(lo, hi, grid)
    return GoldScope(p_min=p_min, p_max=p_max)
