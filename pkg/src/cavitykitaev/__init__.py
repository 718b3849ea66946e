"""Kitaev honeycomb model from coupled cavities with three-level atoms."""

__version__ = "0.1.0"
