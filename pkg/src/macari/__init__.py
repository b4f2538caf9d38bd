"""Discrete-event simulator and sizing tools for the MaCARI cluster-tree MAC."""

__version__ = "0.1.0"
