"""Offline figure generation for plumeseek run artifacts."""

__version__ = "0.1.0"
