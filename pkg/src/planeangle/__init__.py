"""Numerical toolkit for nonlocal Poisson problems in plane angles."""

__version__ = "0.1.0"
