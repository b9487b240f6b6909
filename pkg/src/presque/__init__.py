"""Interprets generalized quantifiers ("few", "most", ...) as percentage
scopes by pragmatic reasoning over a sentence-entailment scorer.

The pipeline: a quantified sentence is compared against percentage-value
rewrites of itself on a fixed percentage grid; a literal listener reads
entailment scores directly, a pragmatic listener reweights the swapped
(speaker) scores by a Bayesian prior mixed over the quantifier inventory.
Gold scopes come from annotated numeric expressions grounded onto the grid.
"""

__version__ = "0.1.0"
