"""LPWAN end-to-end latency simulator and analytics toolkit."""

__version__ = "0.1.0"
