"""Cocycle twists of multiparameter quantized function algebras from disjoint Belavin-Drinfeld triples."""

__version__ = "0.1.0"
