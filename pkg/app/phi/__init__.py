"""Entropy-generating functions and their Löwner representations."""

from .catalog import bregman_scalar, builtin, catalog_specs, parse_phi
from .lowner import builtin_lowner, lowner_reconstruct, raw_to_shifted

__all__ = [
    "bregman_scalar",
    "builtin",
    "catalog_specs",
    "parse_phi",
    "builtin_lowner",
    "lowner_reconstruct",
    "raw_to_shifted",
]
