"""Clifford-algebra spinors, Sachs' paravector field and frame conditions on tetrads."""

__version__ = "0.1.0"
