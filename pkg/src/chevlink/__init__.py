"""Chevalley coset-complex links: exact 1-homology ranks over GF(p),
Steinberg relation verification, lifting homomorphisms, and F2-fillings."""

from .report import __version__

__all__ = ["__version__"]
