"""Exact verification of degenerations and components for 4-dimensional Leibniz algebras."""

__version__ = "0.1.0"
