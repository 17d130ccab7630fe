"""CSV/JSON result files to static figures."""

__version__ = "0.1.0"
