"""Mining optimum Boolean networks for small functions."""

__version__ = "0.1.0"
