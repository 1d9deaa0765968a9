"""Combinatorics of resolution graphs of rational surface singularities."""
from .graph_core import Cycle, GraphError, WeightedDualGraph

__version__ = "0.1.0"

__all__ = ["Cycle", "GraphError", "WeightedDualGraph", "__version__"]
