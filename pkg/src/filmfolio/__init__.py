"""Portfolio decision support for film distributors."""

__version__ = "0.1.0"
