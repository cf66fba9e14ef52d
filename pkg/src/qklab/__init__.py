"""Numerical laboratory for rotationally symmetric Q_k-translating solitons."""

__version__ = "0.1.0"
