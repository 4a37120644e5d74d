"""Preprocessing tests package."""
