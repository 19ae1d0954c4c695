"""Hypernetwork dismantling with a learned agent and greedy baselines.

This module exposes the core types and the evaluation graph.
"""

__version__ = "0.1.0"

from hyperdismantle.baselines import Strategy
from hyperdismantle.dismantling import DismantleTrace, anc, dismantle
from hyperdismantle.graph import graph
from hyperdismantle.hypergraph import Hypernetwork

__all__ = ["DismantleTrace", "Hypernetwork", "Strategy", "anc", "dismantle", "graph", "__version__"]
