"""Approximate lattices in nilpotent Lie groups via quadratic cut-and-project schemes."""

__version__ = "0.1.0"
