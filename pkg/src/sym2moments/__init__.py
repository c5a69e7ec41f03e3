"""Numerics for level-one Hecke eigenforms and moments of symmetric-square L-values."""

__version__ = "0.1.0"
