"""Fire-front and plume tracking for visual and infrared frame sequences."""

__version__ = "0.1.0"
