"""Short-axis-mode rigid-body rotation by Lie transforms in complex variables."""

__version__ = "0.1.0"
