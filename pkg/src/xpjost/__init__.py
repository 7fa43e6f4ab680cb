"""Interacting xp spectral model: Jost functions, spectra and zeta-related tools."""
__version__ = "0.1.0"
