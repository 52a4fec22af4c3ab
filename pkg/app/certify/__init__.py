"""Monotonicity certificates and the Klein-lemma trace checker."""

from .klein_lemma import klein_trace_positivity
from .monotonicity import (
    contraction_defect,
    lowner_matrix_test,
    pinching_defect,
    search_counterexample,
)

__all__ = [
    "klein_trace_positivity",
    "contraction_defect",
    "lowner_matrix_test",
    "pinching_defect",
    "search_counterexample",
]
