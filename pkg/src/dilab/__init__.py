"""Numerical laboratory for isometric dilation of commuting pure contraction pairs."""

__version__ = "0.1.0"
