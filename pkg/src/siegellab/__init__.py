"""Numerical laboratory for real Dirichlet L-functions and exceptional zeros."""

__version__ = "0.1.0"
