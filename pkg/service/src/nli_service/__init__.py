"""Minimal HTTP service scoring premise/hypothesis pairs into three-class
entailment probabilities, behind the same wire protocol the inference
engine's remote scorer client speaks."""

__version__ = "0.1.0"
