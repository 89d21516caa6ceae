"""Exact analysis of minimality for real matrix Schubert varieties."""

__version__ = "0.1.0"
