"""Weak-header proof-of-work consensus lab."""

__version__ = "0.1.0"
