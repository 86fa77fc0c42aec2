"""Exact polyhedral toolkit for groupcast rate regions of combination networks."""
__version__ = "0.1.0"
