"""Local classification of tangential family germs of plane curves."""

__version__ = "0.1.0"
