"""Entropic steering criteria for bipartite and tripartite states."""

__version__ = "0.3.0"
