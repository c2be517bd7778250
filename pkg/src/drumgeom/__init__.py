"""Exact Gassmann-Sunada triples, drum geometries and a Dirichlet spectrum checker."""

__version__ = "0.1.0"
