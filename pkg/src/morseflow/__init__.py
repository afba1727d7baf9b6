"""Exact engine for one-parameter families of Morse data."""

__version__ = "0.1.0"
