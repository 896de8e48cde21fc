"""Exact verification toolkit for Legendrian projective varieties."""

__version__ = "0.1.0"
