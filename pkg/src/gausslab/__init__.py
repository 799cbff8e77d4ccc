"""Numerical verification of harmonic and biharmonic Gauss maps."""

__version__ = "0.1.0"
