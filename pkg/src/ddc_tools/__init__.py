"""DDC tools - Dynamic Distributed Clustering of 2D spatial data."""

__version__ = "0.1.0"
