"""Exact modularity density maximization by branch-and-price.

Built on self-contained LP simplex and MILP branch-and-bound engines.
"""

from .graphs import (
    Community,
    DuplicateEdge,
    EmptyCommunity,
    Graph,
    GraphError,
    GraphTooLarge,
    InvalidPartition,
    NoEdges,
    Partition,
    SelfLoop,
    TooFewVertices,
    VertexOutOfRange,
    brute_force_optimum,
    contribution,
    graph_from_edges,
    modularity,
    modularity_density,
)

__all__ = [
    "Community",
    "DuplicateEdge",
    "EmptyCommunity",
    "Graph",
    "GraphError",
    "GraphTooLarge",
    "InvalidPartition",
    "NoEdges",
    "Partition",
    "SelfLoop",
    "TooFewVertices",
    "VertexOutOfRange",
    "brute_force_optimum",
    "contribution",
    "graph_from_edges",
    "modularity",
    "modularity_density",
]

__version__ = "0.1.0"
