"""Landmark-alignment scoring engine and geo-equity analysis toolchain."""

__version__ = "0.1.0"
