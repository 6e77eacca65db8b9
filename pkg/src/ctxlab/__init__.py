"""Repository-level context retrieval laboratory."""

__version__ = "0.1.0"
