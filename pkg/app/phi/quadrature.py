"""
Gauss-Legendre discretization of the Lebesgue densities in a Löwner measure.

Finite pieces are integrated directly; the tail [split, ∞) uses t = split + s/(1−s).
Errors are estimated by doubling the node count.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_legendre

from app.config.settings import settings
from app.errors import ParameterError
from app.models.phi import DensitySegment, Measure


@dataclass(frozen=True)
class QuadratureConfig:
    node_count: int = 200
    tail_split: float = 1.0

    def __post_init__(self):
        if self.node_count < 2:
            raise ParameterError(f"quadrature needs at least 2 nodes, got {self.node_count}")
        if self.tail_split <= 0.0:
            raise ParameterError(f"tail split must be positive, got {self.tail_split}")

    @classmethod
    def from_settings(cls) -> "QuadratureConfig":
        return cls(settings.QUADRATURE_NODES, settings.QUADRATURE_TAIL_SPLIT)

    def refined(self) -> "QuadratureConfig":
        return QuadratureConfig(2 * self.node_count, self.tail_split)

    def to_dict(self) -> dict:
        return {'node_count': self.node_count, 'tail_split': self.tail_split}


@lru_cache(maxsize=16)
def unit_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to [0, 1]."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def segment_rule(segment: DensitySegment, config: QuadratureConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating against `segment`."""
    s, w = unit_rule(config.node_count)
    lo, hi = segment.lo, segment.hi
    parts_t, parts_w = [], []

    finite_hi = hi if np.isfinite(hi) else max(lo, config.tail_split)
    if finite_hi > lo:
        parts_t.append(lo + (finite_hi - lo) * s)
        parts_w.append((finite_hi - lo) * w)
    if not np.isfinite(hi):
        start = finite_hi
        parts_t.append(start + s / (1.0 - s))
        parts_w.append(w / (1.0 - s) ** 2)

    return np.concatenate(parts_t), segment.density * np.concatenate(parts_w)


def discretize(measure: Measure, config: QuadratureConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Finite node list equivalent to `measure` under the given rule."""
    nodes = [np.asarray(measure.nodes, dtype=float)]
    weights = [np.asarray(measure.weights, dtype=float)]
    for segment in measure.segments:
        t, w = segment_rule(segment, config)
        nodes.append(t)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def integrate(integrand: Callable[[np.ndarray], np.ndarray], measure: Measure,
              config: QuadratureConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    ∫ integrand(t) dμ(t) with a node-doubling error estimate.

    `integrand` maps a node vector of shape (m,) to an array of shape (m, ...);
    the result keeps the trailing shape.

    Returns:
        (value at the refined rule, |coarse − refined|)
    """
    values = []
    for rule in (config, config.refined()):
        t, w = discretize(measure, rule)
        if t.size == 0:
            values.append(None)
            continue
        f = integrand(t)
        values.append(np.tensordot(w, f, axes=(0, 0)))
    if values[0] is None:
        return np.float64(0.0), np.float64(0.0)
    coarse, fine = values
    if not measure.segments:
        return fine, np.zeros_like(fine)
    return fine, np.abs(coarse - fine)
