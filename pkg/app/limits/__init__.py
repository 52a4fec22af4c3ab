"""Projection limits for oracle operators and the finite-rank density construction."""

from .density import finite_rank_approximation
from .limits import (
    approximation_check,
    conjugated_limit,
    entropy_limit,
    projection_family,
    scaled_projection_family,
    schedule_independence_check,
    truncated_entropy,
    unitary_family,
    wlsc_check,
)
from .oracles import (
    BandedOracle,
    ConjugatedOracle,
    DiagonalOracle,
    EmbeddedOracle,
    FunctionOracle,
    RotatedOracle,
    TruncatableOperator,
    materialize,
    oracle_from_spec,
)

__all__ = [
    "finite_rank_approximation",
    "approximation_check",
    "conjugated_limit",
    "entropy_limit",
    "projection_family",
    "scaled_projection_family",
    "schedule_independence_check",
    "truncated_entropy",
    "unitary_family",
    "wlsc_check",
    "BandedOracle",
    "ConjugatedOracle",
    "DiagonalOracle",
    "EmbeddedOracle",
    "FunctionOracle",
    "RotatedOracle",
    "TruncatableOperator",
    "materialize",
    "oracle_from_spec",
]
