"""Invariants of mixed quiver representations: trace generators, defining relations
and their verification by exact evaluation."""

__version__ = "0.1.0"
