"""Exact computation of cores of polynomial distributions and Kohn's multiplier ideals."""

__version__ = "0.1.0"
