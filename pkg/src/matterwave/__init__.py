"""Stationary matter waves from localized sources in uniform fields."""
__version__ = "0.1.0"
