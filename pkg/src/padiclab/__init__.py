"""Exact p-adic integration, pseudonorms on hyperelliptic curves, and F_q point-existence checks."""

__version__ = "0.1.0"
