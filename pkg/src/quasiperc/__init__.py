"""Continuous-time quantum walks and quantum percolation on square and
quasicrystal lattices."""

__version__ = "0.1.0"
