"""Numerical potential theory for two-phase transmission problems with graph interfaces."""

__version__ = "0.1.0"
