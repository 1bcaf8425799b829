"""Characterization toolkit for pre-detected community structures.

Given a network, a partition of its nodes into communities, optional nodal
attributes and an optional sequence of time slices, commscope computes
topological, attribute-based and temporal descriptions of each community and
of the structure as a whole, and serializes them into a deterministic report.
"""

__version__ = "0.1.0"

from .graph import (
    AttributeTable,
    CommunityStructure,
    DynamicNetwork,
    Graph,
    load_attributes,
    load_communities,
    load_graph,
    load_manifest,
    node_profile,
)

__all__ = [
    "AttributeTable",
    "CommunityStructure",
    "DynamicNetwork",
    "Graph",
    "load_attributes",
    "load_communities",
    "load_graph",
    "load_manifest",
    "node_profile",
    "__version__",
]
