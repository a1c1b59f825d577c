"""Hybrid BN Toolkit - Conditional Linear Gaussian Bayesian network learning"""

__version__ = "0.3.0"
