"""Exact algebra toolkit for critical configurations of the logarithmic Fekete problem."""

__version__ = "0.1.0"
