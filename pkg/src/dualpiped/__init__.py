"""Exact geometry-of-numbers toolkit for parallelepipeds and their duals."""

__version__ = "0.1.0"
