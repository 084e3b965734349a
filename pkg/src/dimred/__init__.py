"""Numerical checks of dimensional reduction between repulsive gases and branched polymers."""

__version__ = "0.1.0"
