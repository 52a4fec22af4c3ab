"""
Seeded random instance generators.

Every generator accepts either an integer seed or a numpy Generator, so trial
loops can draw several objects from one per-trial stream.
"""

from typing import Sequence, Tuple, Union

import numpy as np

from app.errors import DimensionMismatchError, PreconditionError
from app.models.operator import Contraction, HermitianOperator, OrthogonalProjector

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial `index` of a run seeded with `seed`."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _gaussian(rng: np.random.Generator, shape: Tuple[int, int], real: bool) -> np.ndarray:
    if real:
        return rng.standard_normal(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(dim: int, seed: SeedLike, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary (orthogonal if `real`) from the QR of a Gaussian matrix."""
    rng = make_rng(seed)
    q, r = np.linalg.qr(_gaussian(rng, (dim, dim), real))
    d = np.diagonal(r)
    phases = d / np.where(np.abs(d) > 0, np.abs(d), 1.0)
    return q * phases


def random_density(dim: int, spectrum_range: Sequence[float] = (0.0, 1.0), seed: SeedLike = 0,
                   real: bool = False) -> HermitianOperator:
    """Hermitian operator with i.i.d. uniform eigenvalues in [lo, hi] and Haar eigenbasis."""
    lo, hi = float(spectrum_range[0]), float(spectrum_range[1])
    if not 0.0 <= lo <= hi <= 1.0:
        raise PreconditionError(f"spectrum range must satisfy 0 ≤ lo ≤ hi ≤ 1, got [{lo}, {hi}]")
    if lo == hi:
        return HermitianOperator.identity(dim, lo)
    rng = make_rng(seed)
    eigenvalues = rng.uniform(lo, hi, dim)
    basis = haar_unitary(dim, rng, real=real)
    return HermitianOperator((basis * eigenvalues) @ basis.conj().T)


def random_spd(dim: int, seed: SeedLike, spectrum_range: Sequence[float] = (0.5, 2.0),
               real: bool = False) -> HermitianOperator:
    """Positive definite operator with eigenvalues uniform in `spectrum_range`."""
    lo, hi = float(spectrum_range[0]), float(spectrum_range[1])
    if lo <= 0.0 or hi < lo:
        raise PreconditionError(f"SPD spectrum range must satisfy 0 < lo ≤ hi, got [{lo}, {hi}]")
    rng = make_rng(seed)
    eigenvalues = rng.uniform(lo, hi, dim)
    basis = haar_unitary(dim, rng, real=real)
    return HermitianOperator((basis * eigenvalues) @ basis.conj().T)


def random_contraction(rows: int, cols: int, seed: SeedLike, real: bool = False) -> Contraction:
    """G / (‖G‖₂ (1 + u)) with Gaussian G and u uniform in [0, 1]."""
    rng = make_rng(seed)
    g = _gaussian(rng, (rows, cols), real)
    u = rng.uniform(0.0, 1.0)
    return Contraction(g / (np.linalg.norm(g, 2) * (1.0 + u)))


def random_unitary(dim: int, seed: SeedLike, real: bool = False) -> Contraction:
    return Contraction(haar_unitary(dim, seed, real=real))


def random_projector(dim: int, rank: int, seed: SeedLike, real: bool = False) -> OrthogonalProjector:
    """Projector onto the first `rank` columns of a Haar unitary."""
    if rank > dim or rank < 0:
        raise DimensionMismatchError(f"rank {rank} must lie in [0, {dim}]")
    if rank == dim:
        return OrthogonalProjector.identity(dim)
    if rank == 0:
        return OrthogonalProjector.zero(dim)
    basis = haar_unitary(dim, seed, real=real)[:, :rank]
    return OrthogonalProjector.from_basis(basis)


def random_edge_density(dim: int, seed: SeedLike, snap: float = 0.1, real: bool = False) -> HermitianOperator:
    """Spectrum uniform in [0, 1] with eigenvalues within `snap` of an endpoint moved onto it."""
    rng = make_rng(seed)
    eigenvalues = rng.uniform(0.0, 1.0, dim)
    eigenvalues[eigenvalues < snap] = 0.0
    eigenvalues[eigenvalues > 1.0 - snap] = 1.0
    basis = haar_unitary(dim, rng, real=real)
    return HermitianOperator((basis * eigenvalues) @ basis.conj().T)
