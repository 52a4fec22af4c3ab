"""Seeded surveys of the Klein defects over random pairs."""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

from app.config.settings import settings
from app.klein.bounds import klein_lower_defect, klein_upper_defect, lipschitz_defect
from app.klein.constants import derive_constants
from app.linalg.sampling import random_density, trial_rng
from app.models.entropy import KernelPolicy
from app.models.phi import PhiSpec
from app.utils.trials import TrialRunner

logger = logging.getLogger(__name__)

B_RANGE = (0.1, 0.9)


def _trial(phi: PhiSpec, dim: int, seed: int, index: int, eps: float, constants, policy) -> Tuple[float, float, float]:
    rng = trial_rng(seed, index)
    lo, hi = max(B_RANGE[0], eps), min(B_RANGE[1], 1.0 - eps)
    A = random_density(dim, (0.0, 1.0), rng)
    B = random_density(dim, (lo, hi), rng)
    A_prime = random_density(dim, (eps, 1.0 - eps), rng)
    return (klein_lower_defect(A, B, phi, constants, policy),
            klein_upper_defect(A, B, phi, constants, policy),
            lipschitz_defect(A, A_prime, B, phi, eps, constants, policy))


def klein_survey(phi: PhiSpec, dim: int, trials: int, seed: int, eps: float = 0.1,
                 grid: Optional[int] = None, policy: Optional[KernelPolicy] = None,
                 workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Derive the constants for φ and evaluate all three defects on `trials` seeded triples.

    B is drawn with spectrum in [0.1, 0.9] (narrowed to [ε, 1−ε] when ε > 0.1), A in
    [0, 1] and A′ in [ε, 1−ε]. A defect below −violation threshold is a violation.
    """
    policy = policy or KernelPolicy.from_settings()
    constants = derive_constants(phi, grid, eps)
    runner = TrialRunner(workers, label=f"klein [{phi.label}]")
    rows: List[Tuple[float, float, float]] = runner.map(
        lambda i: _trial(phi, dim, seed, i, eps, constants, policy), range(trials))

    threshold = -settings.VIOLATION_THRESHOLD
    summary: Dict[str, Any] = {}
    violations = 0
    for column, name in enumerate(('lower', 'upper', 'lipschitz')):
        values = [row[column] for row in rows]
        worst_index = min(range(len(values)), key=values.__getitem__) if values else None
        count = sum(1 for v in values if v < threshold)
        violations += count
        summary[name] = {
            'worst_defect': values[worst_index] if values else math.inf,
            'witness': None if worst_index is None else {'seed': seed, 'trial': worst_index},
            'violations': count,
        }

    verdict = "ViolationFound" if violations else "BoundsHold"
    if violations:
        logger.warning(f"Klein survey [{phi.label}]: {violations} defects below {threshold:g}")
    else:
        logger.info(f"Klein survey [{phi.label}]: {trials} trials, all defects ≥ {threshold:g}")
    return {
        'phi': phi.label,
        'dim': dim,
        'trials': trials,
        'seed': seed,
        'eps': eps,
        'verdict': verdict,
        'constants': constants.to_dict(),
        'defects': summary,
    }
