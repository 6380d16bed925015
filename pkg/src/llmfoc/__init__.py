"""Proof kernel and cut-elimination engine for multifocused linear logic."""

__version__ = "0.1.0"
