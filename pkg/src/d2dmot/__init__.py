"""Network-on-chip topology, routing and flit-level simulation toolkit."""

__version__ = "0.1.0"
