"""Exact computations with derived powers, Atiyah classes and characteristic polynomials."""

__version__ = "0.1.0"
