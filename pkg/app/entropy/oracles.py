"""
Closed-form oracles for the relative entropy.
"""

import numpy as np

from app.entropy.relative import relative_entropy, relative_entropy_on_interval
from app.errors import PreconditionError
from app.linalg.core import apply_function
from app.models.operator import HermitianOperator, ensure_same_dim
from app.phi.catalog import builtin

# Smallest eigenvalue accepted as "positive definite"
PD_TOL = 1e-10


def _require_positive_definite(op: HermitianOperator, what: str) -> None:
    smallest = float(op.eigenvalues[0])
    if smallest <= PD_TOL:
        raise PreconditionError(f"{what} must be positive definite, smallest eigenvalue {smallest:.3e}")


def vn_identity_defect(A: HermitianOperator, B: HermitianOperator) -> float:
    """|H_vN(A,B) − [tr A(log A − log B) − tr A + tr B]|."""
    ensure_same_dim(A, B)
    _require_positive_definite(B, "B")
    _require_positive_definite(A, "A")
    h = relative_entropy(A, B, builtin('vn'))
    log_a = apply_function(A, np.log).entries
    log_b = apply_function(B, np.log).entries
    closed = float(np.real(np.trace(A.entries @ (log_a - log_b)))) - A.trace() + B.trace()
    return abs(h.as_float() - closed)


def gaussian_kl_oracle(A: HermitianOperator, B: HermitianOperator) -> float:
    """½[log det A − log det B + tr(BA⁻¹) − n], the relative entropy of two centered Gaussians."""
    ensure_same_dim(A, B)
    _require_positive_definite(A, "A")
    _require_positive_definite(B, "B")
    logdet_a = float(np.sum(np.log(A.eigenvalues)))
    logdet_b = float(np.sum(np.log(B.eigenvalues)))
    cross = float(np.real(np.trace(np.linalg.solve(A.entries, B.entries))))
    return 0.5 * (logdet_a - logdet_b + cross - A.dim)


def gaussian_matrix_entropy(A: HermitianOperator, B: HermitianOperator) -> float:
    """H(A⁻¹, B⁻¹) with φ = −½ log x on the interval spanned by both inverse spectra."""
    _require_positive_definite(A, "A")
    _require_positive_definite(B, "B")
    inv_a = HermitianOperator(np.linalg.inv(A.entries))
    inv_b = HermitianOperator(np.linalg.inv(B.entries))
    lo = min(inv_a.eigenvalues[0], inv_b.eigenvalues[0])
    hi = max(inv_a.eigenvalues[-1], inv_b.eigenvalues[-1])
    return relative_entropy_on_interval(inv_a, inv_b, builtin('gaussian'), (lo, hi)).as_float()
