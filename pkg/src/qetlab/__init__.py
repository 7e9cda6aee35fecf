"""Energy teleportation versus local extraction in a thermal two-spin system."""

__version__ = "0.1.0"
