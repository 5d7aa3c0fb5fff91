"""Exact computations for A1-fibrations on normal affine surfaces."""

__version__ = "0.1.0"
