"""Centered Semi-Direct Product Toolkit"""

__version__ = "0.1.0"
__description__ = "Centered semi-direct products, Euler-Poincaré flows and 2-jets"
