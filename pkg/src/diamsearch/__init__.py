"""Exact search engine for extremal diameter/order ratios of layered graphs.

The package computes, for a given minimum degree, the largest asymptotic
diameter-to-order ratio achievable by connected graphs whose clique number is
at most 3 (or, in the weaker variant, whose chromatic number is at most 3),
by exhaustively searching for optimal repeatable layer structures and by
building and verifying the explicit extremal graphs they generate.
"""

from .graphs import SmallGraph, clique_number, is_k4_free, chromatic_at_most
from .canonical import CanonicalKey, canonical_key, canonical_form, layered_isomorphic
from .enumeration import enumerate_layer_graphs
from .layered import LayeredGraph, bfs_layers, diameter
from .graph6 import encode_graph6, decode_graph6, graph_to_g6, g6_to_graph

__all__ = [
    "SmallGraph",
    "clique_number",
    "is_k4_free",
    "chromatic_at_most",
    "CanonicalKey",
    "canonical_key",
    "canonical_form",
    "layered_isomorphic",
    "enumerate_layer_graphs",
    "LayeredGraph",
    "bfs_layers",
    "diameter",
    "encode_graph6",
    "decode_graph6",
    "graph_to_g6",
    "g6_to_graph",
]

__version__ = "0.1.0"
