"""Desk-scale numerics for noded surfaces, neck gluing and Cauchy-Riemann operators."""

__version__ = "0.1.0"
