"""
Builtin entropy-generating functions φ and the scalar Bregman divergence.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config.formulas import CATALOG_CONFIG, FormulaTemplates
from app.errors import ParameterError
from app.models.phi import PhiSpec

logger = logging.getLogger(__name__)

CATALOG_NAMES = ('vn', 'car', 'ccr', 'power_neg', 'power_pos', 'xlog_shift', 'neg_log_shift')
EXTRA_NAMES = ('x4', 'gaussian')


def _single_param(name: str, params: Sequence[float]) -> float:
    if params is None or len(params) == 0:
        return float(CATALOG_CONFIG[name]['default_params'][0])
    if len(params) != 1:
        raise ParameterError(f"{name} takes exactly one parameter, got {len(params)}")
    value = float(params[0])
    if not math.isfinite(value):
        raise ParameterError(f"{name} parameter must be finite, got {value}")
    return value


def _no_params(name: str, params: Optional[Sequence[float]]) -> None:
    if params:
        raise ParameterError(f"{name} takes no parameters, got {list(params)}")


def _formula(name: str, params: Tuple[float, ...]) -> str:
    return FormulaTemplates.format_formula(name, params)['phi']


def _vn() -> PhiSpec:
    return PhiSpec(
        name='vn',
        phi=lambda x: x * np.log(x),
        dphi=lambda x: 1.0 + np.log(x),
        ddphi=lambda x: 1.0 / x,
        dphi_divergent_at_0=True,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=0.0,
        phi_at_1=0.0,
        dphi_at_1=1.0,
        formula=_formula('vn', ()),
    )


def _car() -> PhiSpec:
    return PhiSpec(
        name='car',
        phi=lambda x: x * np.log(x) + (1.0 - x) * np.log1p(-x),
        dphi=lambda x: np.log(x) - np.log1p(-x),
        ddphi=lambda x: 1.0 / x + 1.0 / (1.0 - x),
        dphi_divergent_at_0=True,
        dphi_divergent_at_1=True,
        strictly_convex=True,
        phi_at_0=0.0,
        phi_at_1=0.0,
        formula=_formula('car', ()),
    )


def _ccr() -> PhiSpec:
    return PhiSpec(
        name='ccr',
        phi=lambda x: x * np.log(x) - (1.0 + x) * np.log1p(x),
        dphi=lambda x: np.log(x) - np.log1p(x),
        ddphi=lambda x: 1.0 / (x * (1.0 + x)),
        dphi_divergent_at_0=True,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=0.0,
        phi_at_1=-2.0 * math.log(2.0),
        dphi_at_1=-math.log(2.0),
        formula=_formula('ccr', ()),
    )


def _power_neg(m: float) -> PhiSpec:
    if not 0.0 < m <= 1.0:
        raise ParameterError(f"power_neg requires 0 < m ≤ 1, got {m}")
    return PhiSpec(
        name='power_neg',
        phi=lambda x: -np.power(x, m),
        dphi=lambda x: -m * np.power(x, m - 1.0),
        ddphi=lambda x: m * (1.0 - m) * np.power(x, m - 2.0),
        dphi_divergent_at_0=m < 1.0,
        dphi_divergent_at_1=False,
        strictly_convex=m < 1.0,
        phi_at_0=0.0,
        phi_at_1=-1.0,
        params=(m,),
        dphi_at_0=-1.0 if m == 1.0 else None,
        dphi_at_1=-m,
        formula=_formula('power_neg', (m,)),
    )


def _power_pos(m: float) -> PhiSpec:
    if not 1.0 <= m <= 2.0:
        raise ParameterError(f"power_pos requires 1 ≤ m ≤ 2, got {m}")
    return PhiSpec(
        name='power_pos',
        phi=lambda x: np.power(x, m),
        dphi=lambda x: m * np.power(x, m - 1.0),
        ddphi=lambda x: m * (m - 1.0) * np.power(x, m - 2.0),
        dphi_divergent_at_0=False,
        dphi_divergent_at_1=False,
        strictly_convex=m > 1.0,
        phi_at_0=0.0,
        phi_at_1=1.0,
        params=(m,),
        dphi_at_0=0.0 if m > 1.0 else 1.0,
        dphi_at_1=m,
        formula=_formula('power_pos', (m,)),
    )


def _xlog_shift(t: float) -> PhiSpec:
    if t < 0.0:
        raise ParameterError(f"xlog_shift requires t ≥ 0, got {t}")
    return PhiSpec(
        name='xlog_shift',
        phi=lambda x: (x + t) * np.log(x + t),
        dphi=lambda x: 1.0 + np.log(x + t),
        ddphi=lambda x: 1.0 / (x + t),
        dphi_divergent_at_0=t == 0.0,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=t * math.log(t) if t > 0.0 else 0.0,
        phi_at_1=(1.0 + t) * math.log(1.0 + t),
        params=(t,),
        dphi_at_0=1.0 + math.log(t) if t > 0.0 else None,
        dphi_at_1=1.0 + math.log(1.0 + t),
        formula=_formula('xlog_shift', (t,)),
    )


def _neg_log_shift(t: float) -> PhiSpec:
    if t <= 0.0:
        raise ParameterError(f"neg_log_shift requires t > 0, got {t}")
    return PhiSpec(
        name='neg_log_shift',
        phi=lambda x: -np.log(x + t),
        dphi=lambda x: -1.0 / (x + t),
        ddphi=lambda x: 1.0 / (x + t) ** 2,
        dphi_divergent_at_0=False,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=-math.log(t),
        phi_at_1=-math.log(1.0 + t),
        params=(t,),
        dphi_at_0=-1.0 / t,
        dphi_at_1=-1.0 / (1.0 + t),
        formula=_formula('neg_log_shift', (t,)),
    )


def x4() -> PhiSpec:
    """φ = x⁴/4: convex, but φ′ = x³ is not operator monotone."""
    return PhiSpec(
        name='x4',
        phi=lambda x: 0.25 * x ** 4,
        dphi=lambda x: x ** 3,
        ddphi=lambda x: 3.0 * x ** 2,
        dphi_divergent_at_0=False,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=0.0,
        phi_at_1=0.25,
        dphi_at_0=0.0,
        dphi_at_1=1.0,
        formula=_formula('x4', ()),
    )


def gaussian() -> PhiSpec:
    """φ = −½ log x on (0, ∞); only meaningful with an explicit spectral interval."""
    return PhiSpec(
        name='gaussian',
        phi=lambda x: -0.5 * np.log(x),
        dphi=lambda x: -0.5 / x,
        ddphi=lambda x: 0.5 / x ** 2,
        dphi_divergent_at_0=True,
        dphi_divergent_at_1=False,
        strictly_convex=True,
        phi_at_0=float('inf'),
        phi_at_1=0.0,
        dphi_at_1=-0.5,
        formula=_formula('gaussian', ()),
        domain=(0.0, float('inf')),
    )


_FIXED = {'vn': _vn, 'car': _car, 'ccr': _ccr, 'x4': x4, 'gaussian': gaussian}
_FAMILIES = {
    'power_neg': _power_neg,
    'power_pos': _power_pos,
    'xlog_shift': _xlog_shift,
    'neg_log_shift': _neg_log_shift,
}


def builtin(name: str, params: Optional[Sequence[float]] = None) -> PhiSpec:
    """
    Look up a builtin φ by name.

    Args:
        name: One of the catalog names, or 'x4' / 'gaussian'
        params: Family parameter; the catalog default is used when omitted

    Returns:
        The PhiSpec with closed-form φ, φ′, φ″ and endpoint flags
    """
    if name in _FIXED:
        _no_params(name, params)
        return _FIXED[name]()
    if name in _FAMILIES:
        return _FAMILIES[name](_single_param(name, params))
    raise ParameterError(f"unknown phi '{name}'; known: {', '.join(CATALOG_NAMES + EXTRA_NAMES)}")


def parse_phi(designator: str) -> PhiSpec:
    """Parse `name` or `name:p1,p2` into a PhiSpec."""
    text = designator.strip()
    name, _, raw = text.partition(':')
    params: List[float] = []
    if raw.strip():
        for piece in raw.split(','):
            try:
                params.append(float(piece))
            except ValueError:
                raise ParameterError(f"phi parameter '{piece}' in '{designator}' is not a number") from None
    return builtin(name.strip(), params)


def catalog_specs() -> List[PhiSpec]:
    """The seven catalog functions at their default parameters."""
    return [builtin(name) for name in CATALOG_NAMES]


def bregman_scalar(phi: PhiSpec, x: float, y: float) -> float:
    """φ(x) − φ(y) − φ′(y)(x − y); +∞ when φ′ diverges at y and x ≠ y."""
    if x == y:
        return 0.0
    if (y == 0.0 and phi.dphi_divergent_at_0) or (y == 1.0 and phi.dphi_divergent_at_1):
        return float('inf')
    fx, fy, slope = phi.value(x), phi.value(y), phi.derivative(y)
    return float(fx - fy - slope * (x - y))


def bregman_sum(phi: PhiSpec, a: Sequence[float], b: Sequence[float]) -> float:
    """Σᵢ bregman_scalar(φ, aᵢ, bᵢ) for commuting operators given by paired eigenvalues."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ParameterError(f"paired eigenvalue vectors differ in shape: {a.shape} vs {b.shape}")
    same = a == b
    divergent = ((b == 0.0) & phi.dphi_divergent_at_0) | ((b == 1.0) & phi.dphi_divergent_at_1)
    if np.any(divergent & ~same):
        return float('inf')
    live = ~same
    if not np.any(live):
        return 0.0
    x, y = a[live], b[live]
    terms = phi.value(x) - phi.value(y) - phi.derivative(y) * (x - y)
    return float(np.sum(terms))


def catalog_listing() -> List[Dict]:
    """Catalog entries for the `catalog` subcommand."""
    from app.phi.lowner import builtin_lowner, has_lowner

    entries = []
    for name, options in CATALOG_CONFIG.items():
        if not options['listed']:
            continue
        spec = builtin(name)
        formulas = FormulaTemplates.format_formula(name, spec.params)
        entry = {
            'name': name,
            'designator': spec.label,
            'family': formulas['family'],
            'phi': formulas['phi'],
            'dphi': formulas['dphi'],
            'dphi_divergent_at_0': spec.dphi_divergent_at_0,
            'dphi_divergent_at_1': spec.dphi_divergent_at_1,
            'strictly_convex': spec.strictly_convex,
            'phi_at_0': spec.phi_at_0,
            'phi_at_1': spec.phi_at_1,
        }
        if has_lowner(name):
            rep = builtin_lowner(name, spec.params)
            entry['lowner'] = rep.to_dict()
        entries.append(entry)
    logger.debug(f"Catalog listing built with {len(entries)} entries")
    return entries
