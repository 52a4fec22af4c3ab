"""
Data models for entropy-generating functions and their Löwner representations.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import ParameterError

ScalarFunction = Callable[[np.ndarray], np.ndarray]

# Grids used by PhiSpec.validate()
CONVEXITY_GRID = 1001
FINITE_DIFFERENCE_GRID = 101
DECAY_POINTS = (1e-4, 1e-6, 1e-8)


def _evaluate(f: ScalarFunction, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        return np.asarray(f(x), dtype=float) * np.ones_like(x)


@dataclass(frozen=True, eq=False)
class PhiSpec:
    """A convex φ with φ′, φ″ and its endpoint behavior on [0, 1]."""

    name: str
    phi: ScalarFunction
    dphi: ScalarFunction
    ddphi: Optional[ScalarFunction]
    dphi_divergent_at_0: bool
    dphi_divergent_at_1: bool
    strictly_convex: bool
    phi_at_0: float
    phi_at_1: float
    params: Tuple[float, ...] = ()
    dphi_at_0: Optional[float] = None
    dphi_at_1: Optional[float] = None
    formula: str = ""
    domain: Tuple[float, float] = (0.0, 1.0)

    @classmethod
    def custom(cls, name: str, phi: ScalarFunction, dphi: ScalarFunction,
               ddphi: Optional[ScalarFunction] = None, *,
               dphi_divergent_at_0: bool = False, dphi_divergent_at_1: bool = False,
               strictly_convex: bool = True) -> "PhiSpec":
        """User-supplied φ; endpoint values and finite endpoint slopes are taken from the callables."""
        ends = np.array([0.0, 1.0])
        values = _evaluate(phi, ends)
        if not np.all(np.isfinite(values)):
            raise ParameterError(f"custom phi '{name}' must have finite values at 0 and 1")
        slopes = _evaluate(dphi, ends)
        return cls(
            name=name,
            phi=phi,
            dphi=dphi,
            ddphi=ddphi,
            dphi_divergent_at_0=dphi_divergent_at_0,
            dphi_divergent_at_1=dphi_divergent_at_1,
            strictly_convex=strictly_convex,
            phi_at_0=float(values[0]),
            phi_at_1=float(values[1]),
            dphi_at_0=None if dphi_divergent_at_0 else float(slopes[0]),
            dphi_at_1=None if dphi_divergent_at_1 else float(slopes[1]),
            formula="custom",
        )

    @property
    def label(self) -> str:
        """Designator in the `name:p1,p2` form accepted by parse_phi."""
        if not self.params:
            return self.name
        return f"{self.name}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def has_second_derivative(self) -> bool:
        return self.ddphi is not None

    def value(self, x) -> np.ndarray:
        """φ with the continuity limits substituted at exactly 0 and 1."""
        x = np.asarray(x, dtype=float)
        out = _evaluate(self.phi, x)
        out = np.where(x == 0.0, self.phi_at_0, out)
        out = np.where(x == 1.0, self.phi_at_1, out)
        return out

    def derivative(self, x) -> np.ndarray:
        """φ′; −∞ at 0 and +∞ at 1 where the derivative diverges."""
        x = np.asarray(x, dtype=float)
        out = _evaluate(self.dphi, x)
        at_0 = -np.inf if self.dphi_divergent_at_0 else self.dphi_at_0
        at_1 = np.inf if self.dphi_divergent_at_1 else self.dphi_at_1
        if at_0 is not None:
            out = np.where(x == 0.0, at_0, out)
        if at_1 is not None:
            out = np.where(x == 1.0, at_1, out)
        return out

    def second_derivative(self, x) -> np.ndarray:
        if self.ddphi is None:
            raise ParameterError(f"phi '{self.name}' does not provide a second derivative")
        return _evaluate(self.ddphi, np.asarray(x, dtype=float))

    def divergent_at(self, endpoint: int) -> bool:
        return self.dphi_divergent_at_0 if endpoint == 0 else self.dphi_divergent_at_1

    def validate(self) -> List[str]:
        """
        Check convexity, endpoint decay of x·φ′ and finite-difference consistency of φ′.

        Returns:
            List of findings; empty when every check passes
        """
        findings: List[str] = []

        if self.ddphi is not None:
            grid = np.linspace(0.0, 1.0, CONVEXITY_GRID + 2)[1:-1]
            curvature = self.second_derivative(grid)
            worst = float(np.min(curvature))
            if worst < -1e-12:
                findings.append(f"convexity: φ″ reaches {worst:.3e} at x = {grid[np.argmin(curvature)]:.4f}")

        for endpoint in (0, 1):
            points = np.array(DECAY_POINTS)
            x = points if endpoint == 0 else 1.0 - points
            weight = points
            decay = np.abs(weight * self.derivative(x))
            if not np.all(np.isfinite(decay)) or np.any(decay[1:] > 10.0 * decay[:-1]) or decay[-1] > 0.1:
                findings.append(f"endpoint decay at {endpoint}: |distance·φ′| = {decay.tolist()}")

        grid = np.linspace(0.01, 0.99, FINITE_DIFFERENCE_GRID)
        h = 1e-5
        centered = (self.value(grid + h) - self.value(grid - h)) / (2.0 * h)
        exact = self.derivative(grid)
        rel = np.abs(centered - exact) / np.maximum(1.0, np.abs(exact))
        if float(np.max(rel)) > 1e-6:
            findings.append(f"finite differences: relative error {float(np.max(rel)):.3e} in φ′")

        return findings

    def __repr__(self) -> str:
        return f"PhiSpec({self.label})"


@dataclass(frozen=True)
class DensitySegment:
    """Lebesgue density (constant `density`) on [lo, hi]; hi may be +∞."""

    lo: float
    hi: float = float('inf')
    density: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi) or self.density <= 0.0:
            raise ParameterError(f"density segment needs 0 ≤ lo < hi and density > 0, got {self}")

    def to_dict(self) -> dict:
        return {'lo': self.lo, 'hi': None if np.isinf(self.hi) else self.hi, 'density': self.density}


@dataclass(frozen=True)
class Measure:
    """Positive measure on [0, ∞): point masses plus named Lebesgue densities."""

    nodes: Tuple[float, ...] = ()
    weights: Tuple[float, ...] = ()
    segments: Tuple[DensitySegment, ...] = ()

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ParameterError("measure nodes and weights differ in length")
        for t, w in zip(self.nodes, self.weights):
            if t < 0.0 or w <= 0.0:
                raise ParameterError(f"measure atom ({t}, {w}) needs t ≥ 0 and weight > 0")
            if t == 0.0:
                # −log(t)·weight must stay finite for φ to have a limit at the endpoint
                raise ParameterError("a point mass at t = 0 makes φ unbounded at the endpoint")

    @classmethod
    def atoms(cls, nodes: Sequence[float], weights: Sequence[float]) -> "Measure":
        return cls(tuple(float(t) for t in nodes), tuple(float(w) for w in weights))

    @classmethod
    def lebesgue(cls, lo: float = 0.0, hi: float = float('inf'), density: float = 1.0) -> "Measure":
        return cls(segments=(DensitySegment(lo, hi, density),))

    def tail_mass(self) -> float:
        """Σ weight/(2t+1)² for the atoms; densities contribute a closed-form finite amount."""
        atoms = sum(w / (2.0 * t + 1.0) ** 2 for t, w in zip(self.nodes, self.weights))
        dense = sum(s.density * (1.0 / (2.0 * s.lo + 1.0) - (0.0 if np.isinf(s.hi) else 1.0 / (2.0 * s.hi + 1.0))) / 2.0
                    for s in self.segments)
        return atoms + dense

    def to_dict(self) -> dict:
        return {
            'atoms': [[t, w] for t, w in zip(self.nodes, self.weights)],
            'densities': [s.to_dict() for s in self.segments],
        }


@dataclass(frozen=True)
class LownerRepresentation:
    """φ(x) = a′x + c′ − ∫K₁(t,x)dν₁(t) − ∫K₂(t,x)dν₂(t)."""

    a_prime: float
    c_prime: float
    nu1: Measure = field(default_factory=Measure)
    nu2: Measure = field(default_factory=Measure)
    name: str = ""

    def __post_init__(self):
        if not np.isfinite(self.tail_mass):
            raise ParameterError(f"Löwner measures of '{self.name}' must satisfy ∫(dν₁ + dν₂)/(2t+1)² < ∞")

    @property
    def tail_mass(self) -> float:
        return self.nu1.tail_mass() + self.nu2.tail_mass()

    def to_dict(self) -> dict:
        return {
            'a_prime': self.a_prime,
            'c_prime': self.c_prime,
            'nu1': self.nu1.to_dict(),
            'nu2': self.nu2.to_dict(),
            'tail_mass': self.tail_mass,
        }


@dataclass(frozen=True)
class RawLownerRepresentation:
    """φ′(x) = a + b∫(2x−1)/(1 − λ(2x−1)) dν(λ), ν a probability measure on (−1, 1)."""

    a: float
    b: float
    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        if self.b < 0.0:
            raise ParameterError(f"b must be nonnegative, got {self.b}")
        if len(self.nodes) != len(self.weights):
            raise ParameterError("raw measure nodes and weights differ in length")
        if any(w < 0.0 for w in self.weights):
            raise ParameterError("raw measure weights must be nonnegative")
        if self.weights and abs(sum(self.weights) - 1.0) > 1e-12:
            raise ParameterError(f"raw measure must be a probability measure, total mass {sum(self.weights)!r}")
        if any(abs(lam) >= 1.0 for lam in self.nodes):
            raise ParameterError("raw measure must not charge ±1")

    def derivative(self, x) -> np.ndarray:
        """Direct evaluation of the integral form of φ′."""
        y = 2.0 * np.asarray(x, dtype=float) - 1.0
        total = np.zeros_like(y)
        for lam, p in zip(self.nodes, self.weights):
            total = total + p * y / (1.0 - lam * y)
        return self.a + self.b * total
