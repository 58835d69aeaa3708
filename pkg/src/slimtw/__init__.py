"""Separators, barriers and tree decompositions for graphs excluding K_{t,t} and
hexagonal-grid induced minors."""

__version__ = "0.1.0"
