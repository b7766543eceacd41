"""Multi-UAV probabilistic odor source localization simulator."""

__version__ = "0.1.0"
