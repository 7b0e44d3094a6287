"""Rule-driven type migration for Java sources."""

__version__ = "0.1.0"
