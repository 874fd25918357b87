"""Exact verification of the ladder model of an orbit closure and its quantization for classical nilpotent orbits."""

__version__ = "0.1.0"
