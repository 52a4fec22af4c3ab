"""Klein-type bounds and the grid derivation of their constants."""

from .bounds import hilbert_schmidt_gap, klein_lower_defect, klein_upper_defect, lipschitz_defect, upper_gap
from .constants import derive_constants, derive_lipschitz_constant, derive_lower_constant, derive_upper_constant
from .survey import klein_survey

__all__ = [
    "hilbert_schmidt_gap",
    "klein_lower_defect",
    "klein_upper_defect",
    "lipschitz_defect",
    "upper_gap",
    "derive_constants",
    "derive_lipschitz_constant",
    "derive_lower_constant",
    "derive_upper_constant",
    "klein_survey",
]
