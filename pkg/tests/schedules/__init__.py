"""Schedules tests package."""
