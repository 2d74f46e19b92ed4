"""Texture-attribute engine and seismic section labeling pipeline."""

__version__ = "0.1.0"
