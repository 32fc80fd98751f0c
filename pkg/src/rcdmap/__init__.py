"""Community-penalized influential node selection on resampled graphs."""

__version__ = "0.1.0"
