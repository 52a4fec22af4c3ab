"""
JSON files: matrices, oracle descriptions and run reports.

Matrix files hold {"dim": n, "re": [[...]], "im": [[...]]} with "im" optional; a bare
nested list of reals is accepted as well.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from app.errors import ConfigError, OpEntropyError
from app.limits.oracles import EmbeddedOracle, TruncatableOperator, oracle_from_spec
from app.models.operator import HermitianOperator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike, field: str) -> Any:
    """Parse a JSON file, naming `field` in every error."""
    path = Path(path)
    try:
        with path.open('r', encoding='utf-8') as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"{field}: file '{path}' not found", field=field) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{field}: '{path}' is not valid JSON ({exc.msg} at line {exc.lineno})", field=field) from None


def matrix_from_data(data: Any, field: str) -> HermitianOperator:
    try:
        if isinstance(data, dict):
            matrix = np.asarray(data['re'], dtype=float)
            if 'im' in data:
                matrix = matrix + 1j * np.asarray(data['im'], dtype=float)
            declared = data.get('dim')
            if declared is not None and matrix.shape != (int(declared), int(declared)):
                raise ConfigError(f"{field}: declared dim {declared} does not match shape {matrix.shape}", field=field)
        else:
            matrix = np.asarray(data, dtype=float)
        return HermitianOperator(matrix)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        detail = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ConfigError(f"{field}: not a Hermitian matrix ({detail})", field=field) from None


def read_matrix(path: PathLike, field: str = 'matrix') -> HermitianOperator:
    operator = matrix_from_data(read_json(path, field), field)
    logger.debug(f"Read {operator.dim}×{operator.dim} matrix for {field} from {path}")
    return operator


def read_oracle(path: PathLike, field: str = 'oracle', kind: Optional[str] = None) -> TruncatableOperator:
    """
    Oracle file {"kind", "entries", "bandwidth"?}, or a matrix file embedded by zero padding.

    An explicit `kind` lets the file hold just the entries (a list of diagonal values,
    a list of bands, or a matrix).
    """
    data = read_json(path, field)
    if kind == 'embedded':
        return EmbeddedOracle(matrix_from_data(data, field))
    if kind is not None and not (isinstance(data, dict) and 'kind' in data):
        data = {'kind': kind, 'entries': data}
    if isinstance(data, dict) and 'kind' in data:
        try:
            return oracle_from_spec(data)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"{field}: malformed {data.get('kind')} oracle ({exc})", field=field) from None
        except OpEntropyError as exc:
            raise ConfigError(f"{field}: {exc}", field=field) from None
    return EmbeddedOracle(matrix_from_data(data, field))


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings "inf", "-inf" and "nan"."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    return value


def dump_report(report: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False)


def write_report(report: Dict[str, Any], output: Optional[PathLike] = None) -> str:
    """Serialize a report to `output`, or return it for standard output when no path is given."""
    text = dump_report(report)
    if output is not None:
        Path(output).write_text(text + "\n", encoding='utf-8')
        logger.info(f"Report written to {output}")
    return text
