"""Sampling tests package."""
