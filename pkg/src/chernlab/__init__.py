"""Exact cyclic homology and Chern characters for Rips complexes of finite groups."""

__version__ = "0.1.0"
