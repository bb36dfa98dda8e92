"""tabxai: train tabular models, explain them, and build consensus rankings."""

__version__ = "0.1.0"
