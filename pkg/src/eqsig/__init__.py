"""Equivariant signatures, canonical fiber models and quasi-free equivariant bundles on finite complexes."""

__version__ = "0.1.0"
