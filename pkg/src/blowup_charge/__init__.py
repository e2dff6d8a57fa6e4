"""Numerical invariants of rank-2 bundles on the blown-up plane."""

from .algebra import BiLaurent, MatrixBL, Monomial, Window, parse_polynomial
from .bundle import SPLIT, BundleV, ExtensionClass, make_bundle
from .invariants import InvariantReport, report

__all__ = [
    "BiLaurent", "MatrixBL", "Monomial", "Window", "parse_polynomial",
    "SPLIT", "BundleV", "ExtensionClass", "make_bundle",
    "InvariantReport", "report",
]

__version__ = "0.1.0"
