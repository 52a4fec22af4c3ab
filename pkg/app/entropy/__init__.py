"""Relative entropy, entropy and closed-form oracles."""

from .relative import entropy_S, relative_entropy, relative_entropy_on_interval, ssa_defect

__all__ = ["entropy_S", "relative_entropy", "relative_entropy_on_interval", "ssa_defect"]
