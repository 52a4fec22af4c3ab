"""
Catalog formula templates and listing configuration.
"""

from typing import Any, Dict, Sequence


class FormulaTemplates:
    """Human-readable formulas for the entropy-generating functions."""

    # Formula templates with parameter placeholders
    TEMPLATES = {
        'vn': {
            'phi': "x·log(x)",
            'dphi': "1 + log(x)",
            'family': "von Neumann",
        },
        'car': {
            'phi': "x·log(x) + (1−x)·log(1−x)",
            'dphi': "log(x) − log(1−x)",
            'family': "Fermi-Dirac (CAR)",
        },
        'ccr': {
            'phi': "x·log(x) − (1+x)·log(1+x)",
            'dphi': "log(x) − log(1+x)",
            'family': "Bose-Einstein (CCR)",
        },
        'power_neg': {
            'phi': "−x^{m}",
            'dphi': "−{m}·x^({m}−1)",
            'family': "negative power, 0 < m ≤ 1",
        },
        'power_pos': {
            'phi': "x^{m}",
            'dphi': "{m}·x^({m}−1)",
            'family': "positive power, 1 ≤ m ≤ 2",
        },
        'xlog_shift': {
            'phi': "(x+{t})·log(x+{t})",
            'dphi': "1 + log(x+{t})",
            'family': "shifted x·log(x), t ≥ 0",
        },
        'neg_log_shift': {
            'phi': "−log(x+{t})",
            'dphi': "−1/(x+{t})",
            'family': "shifted −log(x), t > 0",
        },
        'x4': {
            'phi': "x^4/4",
            'dphi': "x^3",
            'family': "quartic (derivative not operator monotone)",
        },
        'gaussian': {
            'phi': "−log(x)/2",
            'dphi': "−1/(2x)",
            'family': "Gaussian relative entropy generator on (0, ∞)",
        },
    }

    # Parameter names per family, in designator order
    PARAMETERS = {
        'power_neg': ('m',),
        'power_pos': ('m',),
        'xlog_shift': ('t',),
        'neg_log_shift': ('t',),
    }

    @staticmethod
    def format_formula(name: str, params: Sequence[float] = ()) -> Dict[str, str]:
        """
        Fill a formula template with parameter values.

        Args:
            name: Catalog family name ('vn', 'power_neg', ...)
            params: Parameter values in designator order

        Returns:
            Dictionary with 'phi', 'dphi' and 'family' strings
        """
        template = FormulaTemplates.TEMPLATES.get(name)
        if template is None:
            return {'phi': name, 'dphi': f"{name}′", 'family': "custom"}

        names = FormulaTemplates.PARAMETERS.get(name, ())
        format_data = {key: f"{value:g}" for key, value in zip(names, params)}
        return {key: text.format(**format_data) for key, text in template.items()}


def get_catalog_config() -> Dict[str, Any]:
    """Catalog listing configuration: which families are listed and their default parameters."""
    return {
        'vn': {'listed': True, 'default_params': ()},
        'car': {'listed': True, 'default_params': ()},
        'ccr': {'listed': True, 'default_params': ()},
        'power_neg': {'listed': True, 'default_params': (0.5,)},
        'power_pos': {'listed': True, 'default_params': (1.5,)},
        'xlog_shift': {'listed': True, 'default_params': (0.5,)},
        'neg_log_shift': {'listed': True, 'default_params': (0.5,)},
        'x4': {'listed': False, 'default_params': ()},
        'gaussian': {'listed': False, 'default_params': ()},
    }


# Configuration for catalog listing
CATALOG_CONFIG = get_catalog_config()
