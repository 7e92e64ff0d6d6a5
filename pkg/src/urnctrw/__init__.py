"""Correlated CTRWs from urn chains and fractional Pearson diffusions."""

__version__ = "0.1.0"
