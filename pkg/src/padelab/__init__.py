"""Multipoint Pade approximation laboratory.

Builds multipoint Pade approximants on triangular interpolation tables and
checks their convergence, interpolation-node equidistribution, and zero
clustering against logarithmic-potential predictions.
"""

__version__ = "0.1.0"

from .polynomial import Polynomial, RootSet, poly_eval, poly_from_roots, poly_roots

__all__ = [
    "Polynomial",
    "RootSet",
    "poly_eval",
    "poly_from_roots",
    "poly_roots",
    "__version__",
]
