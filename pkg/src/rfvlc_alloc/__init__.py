"""Energy-efficient resource allocation for aggregated RF/VLC heterogeneous networks."""

__version__ = "0.1.0"
