"""Dependency-guided synchronization for stream processing."""

__version__ = '0.1.0'
