"""Data tests package."""
