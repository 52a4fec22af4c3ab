"""
Grid derivation of the constants in the Klein-type bounds.

    lower:      Bregman(x,y) ≥ C (1 + |φ′(y)|)(x−y)²
    upper:      Bregman(x,y) ≤ C (y⁻² + (1−y)⁻²)(x−y)²
    Lipschitz:  C_ε ≥ max(sup Bregman/(x−y)², sup φ″) with y and the φ″ range kept ε away from the ends

Each scalar bound transfers to the trace inequality by Klein's lemma. Constants are
shrunk (lower) or enlarged (upper, Lipschitz) by the factor 0.9.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from app.config.settings import settings
from app.errors import PreconditionError
from app.models.phi import PhiSpec
from app.models.reports import KleinConstants
from app.utils.logging import log_constant_derivation

logger = logging.getLogger(__name__)

SAFETY = 0.9
# Lattices stay this far from an endpoint where φ′ diverges
DIVERGENT_MARGIN = 1e-4
# Keeps y⁻² + (1−y)⁻² finite in the upper-bound lattice
UPPER_MARGIN = 1e-4
MIN_GRID = 100
STABILITY_TOL = 0.05
NONCONVEX_TOL = 1e-10


def _check_grid(grid: int) -> int:
    grid = int(grid)
    if grid < MIN_GRID:
        raise PreconditionError(f"derivation grid must be at least {MIN_GRID}, got {grid}")
    return grid


def _lattices(grid: int, margin_0: float, margin_1: float) -> Tuple[np.ndarray, np.ndarray]:
    """x over [0, 1]; y over [margin_0, 1 − margin_1]."""
    x = np.linspace(0.0, 1.0, grid)
    y = np.linspace(margin_0, 1.0 - margin_1, grid)
    return x, y


def _bregman_table(phi: PhiSpec, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bregman(xᵢ, yⱼ), (xᵢ − yⱼ)² and the off-diagonal mask."""
    diff = x[:, None] - y[None, :]
    table = phi.value(x)[:, None] - phi.value(y)[None, :] - phi.derivative(y)[None, :] * diff
    square = diff * diff
    mask = np.abs(diff) > 1e-12
    worst = float(np.min(np.where(mask, table, 0.0)))
    scale = 1.0 + float(np.max(np.abs(phi.value(x))))
    if worst < -NONCONVEX_TOL * scale:
        raise PreconditionError(f"{phi.label} is not convex: Bregman divergence reaches {worst:.3e}")
    return table, square, mask


def derive_lower_constant(phi: PhiSpec, grid: Optional[int] = None) -> float:
    """min of Bregman(x,y)/[(1 + |φ′(y)|)(x−y)²] over the lattice, times 0.9."""
    grid = _check_grid(grid or settings.KLEIN_GRID)
    if not phi.strictly_convex:
        raise PreconditionError(f"{phi.label} is not strictly convex; no positive lower constant exists")
    margin_0 = DIVERGENT_MARGIN if phi.dphi_divergent_at_0 else 0.0
    margin_1 = DIVERGENT_MARGIN if phi.dphi_divergent_at_1 else 0.0
    x, y = _lattices(grid, margin_0, margin_1)
    table, square, mask = _bregman_table(phi, x, y)
    weight = 1.0 + np.abs(phi.derivative(y))[None, :]
    ratio = np.where(mask, table / np.where(mask, weight * square, 1.0), np.inf)
    constant = SAFETY * float(np.min(ratio))
    if not constant > 0.0:
        raise PreconditionError(f"{phi.label}: lower ratio minimum {constant / SAFETY:.3e} is not positive")
    return constant


def derive_upper_constant(phi: PhiSpec, grid: Optional[int] = None) -> float:
    """max of Bregman(x,y)/[(y⁻² + (1−y)⁻²)(x−y)²] over the lattice, divided by 0.9."""
    grid = _check_grid(grid or settings.KLEIN_GRID)
    x, y = _lattices(grid, UPPER_MARGIN, UPPER_MARGIN)
    table, square, mask = _bregman_table(phi, x, y)
    weight = (y ** -2 + (1.0 - y) ** -2)[None, :]
    ratio = np.where(mask, table / np.where(mask, weight * square, 1.0), -np.inf)
    constant = float(np.max(ratio)) / SAFETY
    if not constant > 0.0:
        raise PreconditionError(f"{phi.label}: upper ratio maximum {constant * SAFETY:.3e} is not positive")
    return constant


def derive_lipschitz_constant(phi: PhiSpec, eps: float, grid: Optional[int] = None) -> float:
    """C_ε = max(sup Bregman/(x−y)² with y ∈ [ε, 1−ε], sup φ″ on [ε/2, 1−ε/2]) / 0.9."""
    grid = _check_grid(grid or settings.KLEIN_GRID)
    if not 0.0 < eps < 0.5:
        raise PreconditionError(f"eps must lie in (0, 1/2), got {eps}")
    if not phi.has_second_derivative:
        raise PreconditionError(f"{phi.label} has no second derivative; C_ε cannot be derived")
    x, y = _lattices(grid, eps, eps)
    table, square, mask = _bregman_table(phi, x, y)
    quadratic = float(np.max(np.where(mask, table / np.where(mask, square, 1.0), -np.inf)))
    curvature = float(np.max(phi.second_derivative(np.linspace(eps / 2.0, 1.0 - eps / 2.0, grid))))
    constant = max(quadratic, curvature) / SAFETY
    if not constant > 0.0:
        raise PreconditionError(f"{phi.label}: Lipschitz constant {constant:.3e} is not positive")
    return constant


def smooth_upper_constant(phi: PhiSpec) -> Optional[float]:
    """sup φ″/(2·0.9) when φ″ is bounded on [0, 1], else None."""
    if not phi.has_second_derivative:
        return None
    samples = np.array([1e-8, 1e-4, 1.0 - 1e-4, 1.0 - 1e-8])
    near = phi.second_derivative(samples)
    if not np.all(np.isfinite(near)) or near[0] > 10.0 * max(near[1], 1e-300) or near[3] > 10.0 * max(near[2], 1e-300):
        return None
    grid = np.linspace(0.0, 1.0, 2001)
    with np.errstate(divide='ignore', invalid='ignore'):
        values = phi.second_derivative(grid)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return None
    return float(np.max(values)) / (2.0 * SAFETY)


def _relative_change(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def derive_constants(phi: PhiSpec, grid: Optional[int] = None, eps: float = 0.1) -> KleinConstants:
    """
    Derive all Klein constants and check their stability under grid doubling.

    The reported constants are the conservative choice across the two grids.
    """
    grid = _check_grid(grid or settings.KLEIN_GRID)
    coarse = (derive_lower_constant(phi, grid), derive_upper_constant(phi, grid),
              derive_lipschitz_constant(phi, eps, grid))
    fine = (derive_lower_constant(phi, 2 * grid), derive_upper_constant(phi, 2 * grid),
            derive_lipschitz_constant(phi, eps, 2 * grid))
    changes = [_relative_change(a, b) for a, b in zip(coarse, fine)]
    stable = max(changes) < STABILITY_TOL

    constants = KleinConstants(
        phi=phi.label,
        c_lower=min(coarse[0], fine[0]),
        c_upper=max(coarse[1], fine[1]),
        c_eps=max(coarse[2], fine[2]),
        eps=eps,
        derivation_grid=grid,
        stable=stable,
        c_upper_smooth=smooth_upper_constant(phi),
        metadata={
            'safety_factor': SAFETY,
            'refined_grid': 2 * grid,
            'coarse': list(coarse),
            'fine': list(fine),
            'relative_changes': changes,
            'divergent_margin': DIVERGENT_MARGIN,
            'upper_margin': UPPER_MARGIN,
        },
    )
    log_constant_derivation(logger, phi.label,
                            {'c_lower': constants.c_lower, 'c_upper': constants.c_upper, 'c_eps': constants.c_eps},
                            stable)
    return constants
