"""Networks tests package."""
