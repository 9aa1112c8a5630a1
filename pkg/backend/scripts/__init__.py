"""Data generation scripts."""
