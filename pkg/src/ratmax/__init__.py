"""Finite-scale toolkit for two-parameter maximal Fourier multipliers over rational frequencies."""

__version__ = "0.1.0"
