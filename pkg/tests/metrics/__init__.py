"""Metrics tests package."""
