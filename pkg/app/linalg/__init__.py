"""Dense Hermitian linear algebra (operator-core)."""

from .core import (
    apply_function,
    clamp_spectrum,
    compress,
    conjugate,
    doubling_isometry,
    eig_hermitian,
    schur_inverse_block_check,
)
from .sampling import random_contraction, random_density, random_projector

__all__ = [
    "apply_function",
    "clamp_spectrum",
    "compress",
    "conjugate",
    "doubling_isometry",
    "eig_hermitian",
    "schur_inverse_block_check",
    "random_contraction",
    "random_density",
    "random_projector",
]
