"""
Löwner integral representations of φ.

Shifted form:

    φ(x) = a′x + c′ − ∫K₁(t,x) dν₁(t) − ∫K₂(t,x) dν₂(t)
    K₁(t,x) = log(t+x) − log(t+½) − (2x−1)/(2t+1)
    K₂(t,x) = log(t+1−x) − log(t+½) + (2x−1)/(2t+1)

Raw form: φ′(x) = a + b∫(2x−1)/(1−λ(2x−1)) dν(λ) on (−1, 1).
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import ParameterError, PreconditionError, QuadratureError
from app.models.phi import LownerRepresentation, Measure, RawLownerRepresentation
from app.phi.quadrature import QuadratureConfig, integrate

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8

# Below this |u| the kernels use their Taylor series
_SERIES_CUTOFF = 1e-3

ArrayLike = Union[float, Sequence[float], np.ndarray]


def has_lowner(name: str) -> bool:
    return name in ('vn', 'car', 'ccr', 'xlog_shift', 'neg_log_shift')


def builtin_lowner(name: str, params: Optional[Sequence[float]] = None) -> LownerRepresentation:
    """Closed-form representation for the tabulated functions and the two shifted families."""
    half_log2 = math.log(2.0)
    if name == 'vn':
        return LownerRepresentation(1.0 - half_log2, -0.5, Measure.lebesgue(0.0), Measure(), name='vn')
    if name == 'car':
        return LownerRepresentation(0.0, -half_log2, Measure.lebesgue(0.0), Measure.lebesgue(0.0), name='car')
    if name == 'ccr':
        return LownerRepresentation(-math.log(3.0), half_log2 - math.log(3.0),
                                    Measure.lebesgue(0.0, 1.0), Measure(), name='ccr')
    if name == 'xlog_shift':
        t = float(params[0]) if params else 0.5
        if t < 0.0:
            raise ParameterError(f"xlog_shift requires t ≥ 0, got {t}")
        a_prime = 1.0 + math.log(t + 0.5)
        c_prime = (t + 0.5) * math.log(t + 0.5) - 0.5 * a_prime
        return LownerRepresentation(a_prime, c_prime, Measure.lebesgue(t), Measure(), name='xlog_shift')
    if name == 'neg_log_shift':
        t = float(params[0]) if params else 0.5
        if t <= 0.0:
            raise ParameterError(f"neg_log_shift requires t > 0, got {t}")
        a_prime = -2.0 / (2.0 * t + 1.0)
        c_prime = 1.0 / (2.0 * t + 1.0) - math.log(t + 0.5)
        return LownerRepresentation(a_prime, c_prime, Measure.atoms([t], [1.0]), Measure(), name='neg_log_shift')
    raise ParameterError(f"no Löwner representation tabulated for '{name}'")


def _log1p_minus(u: np.ndarray) -> np.ndarray:
    """log(1+u) − u without cancellation for small u."""
    with np.errstate(invalid='ignore', divide='ignore'):
        direct = np.log1p(u) - u
    series = u * u * (-0.5 + u * (1.0 / 3.0 + u * (-0.25 + u * 0.2)))
    return np.where(np.abs(u) < _SERIES_CUTOFF, series, direct)


def _ratio(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    # u = (x − ½)/(t + ½), shape (nodes, points)
    return (x[None, :] - 0.5) / (t[:, None] + 0.5)


def kernel_1(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    return _log1p_minus(_ratio(t, x))


def kernel_2(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    return _log1p_minus(-_ratio(t, x))


def _check_points(x: ArrayLike) -> Tuple[np.ndarray, bool]:
    points = np.asarray(x, dtype=float)
    scalar = points.ndim == 0
    points = np.atleast_1d(points)
    if np.any(points <= 0.0) or np.any(points >= 1.0):
        raise PreconditionError("Löwner reconstruction is defined for x in the open interval (0, 1)")
    return points, scalar


def reconstruct_with_estimate(rep: LownerRepresentation, x: ArrayLike,
                              quadrature: Optional[QuadratureConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """φ(x) from the shifted representation and the node-doubling error estimate."""
    quadrature = quadrature or QuadratureConfig.from_settings()
    points, _ = _check_points(x)
    first, err1 = integrate(lambda t: kernel_1(t, points), rep.nu1, quadrature)
    second, err2 = integrate(lambda t: kernel_2(t, points), rep.nu2, quadrature)
    value = rep.a_prime * points + rep.c_prime - first - second
    return np.asarray(value, dtype=float) * np.ones_like(points), np.asarray(err1 + err2) * np.ones_like(points)


def lowner_reconstruct(rep: LownerRepresentation, x: ArrayLike,
                       quadrature: Optional[QuadratureConfig] = None,
                       tol: float = DEFAULT_TOLERANCE) -> Union[float, np.ndarray]:
    """
    Evaluate φ from its shifted Löwner representation.

    Args:
        rep: Shifted representation (a′, c′, ν₁, ν₂)
        x: Point or points in (0, 1)
        quadrature: Rule for the Lebesgue densities; settings default when omitted
        tol: Largest accepted quadrature error estimate

    Returns:
        φ(x), a float for scalar input
    """
    _, scalar = _check_points(x)
    value, error = reconstruct_with_estimate(rep, x, quadrature)
    worst = float(np.max(error))
    if worst > tol:
        raise QuadratureError(f"quadrature error estimate {worst:.3e} exceeds tolerance {tol:.1e}", estimate=worst)
    logger.debug(f"Reconstructed {rep.name or 'representation'} at {value.size} points, error ≤ {worst:.2e}")
    return float(value[0]) if scalar else value


def lowner_derivative(rep: LownerRepresentation, x: ArrayLike,
                      quadrature: Optional[QuadratureConfig] = None) -> Union[float, np.ndarray]:
    """φ′(x) from the shifted representation."""
    quadrature = quadrature or QuadratureConfig.from_settings()
    points, scalar = _check_points(x)

    def slope_1(t):
        # ∂K₁/∂x = (½ − x)/((t + x)(t + ½))
        return (0.5 - points[None, :]) / ((t[:, None] + points[None, :]) * (t[:, None] + 0.5))

    def slope_2(t):
        # ∂K₂/∂x = (½ − x)/((t + 1 − x)(t + ½))
        return (0.5 - points[None, :]) / ((t[:, None] + 1.0 - points[None, :]) * (t[:, None] + 0.5))

    first, _ = integrate(slope_1, rep.nu1, quadrature)
    second, _ = integrate(slope_2, rep.nu2, quadrature)
    value = np.asarray(rep.a_prime - first - second, dtype=float) * np.ones_like(points)
    return float(value[0]) if scalar else value


def raw_to_shifted(raw: RawLownerRepresentation, c: float = 0.0) -> LownerRepresentation:
    """
    Convert the raw form to the shifted form.

    λ ∈ (−1, 0) lands in ν₁ at t = −(1+λ)/(2λ); λ ∈ (0, 1) lands in ν₂ at t = (1−λ)/(2λ).
    Weights pick up the factor b·(2t+1)²/2 and a′ = a, c′ = c (so φ(½) = a/2 + c).
    """
    nodes1, weights1, nodes2, weights2 = [], [], [], []
    for lam, p in zip(raw.nodes, raw.weights):
        if lam == 0.0 or abs(lam) >= 1.0:
            raise ParameterError(f"raw measure node at λ = {lam} has no shifted counterpart")
        if p == 0.0 or raw.b == 0.0:
            continue
        if lam < 0.0:
            t = -(1.0 + lam) / (2.0 * lam)
            nodes1.append(t)
            weights1.append(raw.b * p * (2.0 * t + 1.0) ** 2 / 2.0)
        else:
            t = (1.0 - lam) / (2.0 * lam)
            nodes2.append(t)
            weights2.append(raw.b * p * (2.0 * t + 1.0) ** 2 / 2.0)
    return LownerRepresentation(
        a_prime=raw.a,
        c_prime=c,
        nu1=Measure.atoms(nodes1, weights1),
        nu2=Measure.atoms(nodes2, weights2),
        name='raw',
    )
