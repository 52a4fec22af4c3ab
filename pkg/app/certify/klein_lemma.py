"""
Trace positivity from scalar positivity: if Σ f_k(x)g_k(y) ≥ 0 on [a,b]², then
Σ tr f_k(A)g_k(B) ≥ 0 for Hermitian a ≤ A, B ≤ b.
"""

import logging
from typing import Callable, Sequence, Tuple

import numpy as np

from app.errors import DimensionMismatchError, PreconditionError
from app.linalg.core import apply_function, clamp_spectrum
from app.models.operator import HermitianOperator, ensure_same_dim

logger = logging.getLogger(__name__)

GRID_SIZE = 101
GRID_TOL = 1e-12

ScalarFunction = Callable[[np.ndarray], np.ndarray]


def scalar_grid_minimum(f_list: Sequence[ScalarFunction], g_list: Sequence[ScalarFunction],
                        interval: Tuple[float, float], size: int = GRID_SIZE) -> float:
    """min over a size×size grid of [a,b]² of Σ f_k(x)g_k(y)."""
    a, b = float(interval[0]), float(interval[1])
    x = np.linspace(a, b, size)
    with np.errstate(divide='ignore', invalid='ignore'):
        total = sum(np.outer(np.asarray(f(x), dtype=float) * np.ones_like(x),
                             np.asarray(g(x), dtype=float) * np.ones_like(x))
                    for f, g in zip(f_list, g_list))
    if not np.all(np.isfinite(total)):
        raise PreconditionError(f"scalar pairs are not finite on [{a}, {b}]²")
    return float(np.min(total))


def klein_trace_positivity(f_list: Sequence[ScalarFunction], g_list: Sequence[ScalarFunction],
                           A: HermitianOperator, B: HermitianOperator,
                           interval: Tuple[float, float]) -> float:
    """
    Σ_k tr[f_k(A) g_k(B)] after checking the scalar hypothesis on a 101×101 grid.

    Raises:
        PreconditionError: the scalar sum is negative somewhere on the grid
    """
    if len(f_list) != len(g_list) or not f_list:
        raise DimensionMismatchError("f_list and g_list must be non-empty and of equal length")
    ensure_same_dim(A, B)
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise PreconditionError(f"interval must satisfy a < b, got [{a}, {b}]")

    smallest = scalar_grid_minimum(f_list, g_list, (a, b))
    if smallest < -GRID_TOL:
        raise PreconditionError(
            f"Σ f_k(x)g_k(y) reaches {smallest:.3e} on [{a}, {b}]²; the scalar hypothesis fails"
        )

    tol = 1e-10 * max(1.0, abs(a), abs(b))
    clamp_spectrum(A.eigenvalues, a, b, tol, what="A")
    clamp_spectrum(B.eigenvalues, a, b, tol, what="B")
    total = 0.0
    for f, g in zip(f_list, g_list):
        fa = apply_function(A, f).entries
        gb = apply_function(B, g).entries
        total += float(np.real(np.sum(fa * gb.T)))
    logger.debug(f"Klein trace sum {total:.6e} over {len(f_list)} pairs (grid minimum {smallest:.3e})")
    return total
