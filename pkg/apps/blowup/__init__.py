"""Simulation and blow-up certification toolkit for compressible non-Newtonian fluids."""

__version__ = '1.0.0'
