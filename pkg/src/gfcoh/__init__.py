"""Exact Gelfand-Fuks cohomology of formal vector fields and local descent."""

__version__ = "0.1.0"
