"""Percentage candidate space and quantifier inventory.

The grid is the evenly spaced set {0, beta, 2*beta, ..., 1} of candidate
percentage values a quantifier may denote. Points are exact rationals
(k / (1/beta)), never floats: 0.05 has no exact binary representation, and
snapping/equality on the grid must be deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

# Quantifier lexemes the engine reasons over, in canonical order.
DEFAULT_QUANTIFIERS = (
    "all",
    "generally",
    "most",
    "usually",
    "some",
    "likely",
    "few",
    "little",
    "occasionally",
    "none",
    "seldom",
    "tiny",
    "small",
    "moderate",
    "large",
)


class NonDividingBeta(ValueError):
    """Raised when 1/beta is not an integer, so no even grid exists."""


def as_fraction(value: int | float | str | Rational) -> Fraction:
    """Convert a user-supplied number to an exact Fraction.

    Floats go through their shortest decimal repr, so 0.05 becomes 1/20
    rather than the nearest binary double. Strings may be decimals ("0.05")
    or ratios ("1/20").
    """
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class PercentageGrid:
    """The candidate percentage values {0, beta, ..., 1}.

    points are strictly increasing exact rationals with constant step beta;
    the first is always 0 and the last always 1.
    """

    beta: Fraction
    points: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        steps = 1 / self.beta
        if not (0 < self.beta <= 1) or steps.denominator != 1:
            raise NonDividingBeta(f"1/beta must be an integer, got beta={self.beta}")
        expected = tuple(Fraction(k) * self.beta for k in range(int(steps) + 1))
        if self.points != expected:
            raise ValueError("points must be exactly {0, beta, 2*beta, ..., 1}")

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: object) -> bool:
        if not isinstance(p, Rational):
            return False
        q = Fraction(p) / self.beta
        return q.denominator == 1 and 0 <= q <= len(self.points) - 1

    def index_of(self, p: Fraction) -> int:
        """Grid index of an on-grid point (point = index * beta)."""
        if p not in self:
            raise ValueError(f"{p} is not a point of the beta={self.beta} grid")
        return int(p / self.beta)


def make_grid(beta: int | float | str | Rational) -> PercentageGrid:
    """Build the percentage grid for an interval width beta.

    Raises NonDividingBeta unless 1/beta is an integer (beta must evenly
    divide the [0, 1] spectrum).
    """
    b = as_fraction(beta)
    if not (0 < b <= 1):
        raise NonDividingBeta(f"beta must lie in (0, 1], got {b}")
    steps = 1 / b
    if steps.denominator != 1:
        raise NonDividingBeta(f"1/beta must be an integer, got beta={b}")
    return PercentageGrid(beta=b, points=tuple(Fraction(k) * b for k in range(int(steps) + 1)))


def snap_outward(
    lo: Fraction, hi: Fraction, grid: PercentageGrid
) -> tuple[Fraction, Fraction]:
    """Smallest grid-aligned interval containing [lo, hi].

    Returns (p_min, p_max) where p_min is the largest grid point <= lo and
    p_max the smallest grid point >= hi. Inputs must already lie in [0, 1].
    """
    if not (0 <= lo <= hi <= 1):
        raise ValueError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    b = grid.beta
    p_min = (lo / b).__floor__() * b
    p_max = (hi / b).__ceil__() * b
    return Fraction(p_min), Fraction(p_max)


@dataclass(frozen=True)
class QuantifierInventory:
    """Ordered set of quantifier lexemes the listener models range over."""

    quantifiers: tuple[str, ...] = DEFAULT_QUANTIFIERS

    def __post_init__(self) -> None:
        if not self.quantifiers:
            raise ValueError("inventory must be non-empty")
        if len(set(self.quantifiers)) != len(self.quantifiers):
            raise ValueError("inventory lexemes must be unique")
        for q in self.quantifiers:
            if not q or q != q.lower():
                raise ValueError(f"lexemes must be non-empty lowercase, got {q!r}")

    def __contains__(self, q: object) -> bool:
        return q in self.quantifiers

    def __iter__(self):
        return iter(self.quantifiers)

    def __len__(self) -> int:
        return len(self.quantifiers)
