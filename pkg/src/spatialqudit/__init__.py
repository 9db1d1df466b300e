"""Tomography, entanglement and bit-commitment analysis of spatial-mode qudits."""
__version__ = "0.1.0"
