"""Numerical laboratory for eikonal mechanics: background spectrum, modulation waves,
phase-space dynamics, Pauli spin and Bell correlations."""

__version__ = "0.1.0"
