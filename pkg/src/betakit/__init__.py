"""Exact, floating-point and Monte Carlo checks of beta-function identities."""

__version__ = "0.1.0"
