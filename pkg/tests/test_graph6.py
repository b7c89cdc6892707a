import random

import pytest

from diamsearch.graph6 import decode_graph6, encode_graph6, g6_to_graph, graph_to_g6
from diamsearch.graphs import SmallGraph


class TestKnownStrings:
    # reference strings from the format specification
    def test_k4(self):
        assert graph_to_g6(SmallGraph.complete(4)) == "C~"

    def test_empty_5(self):
        assert graph_to_g6(SmallGraph.empty(5)) == "D??"

    def test_p4(self):
        assert graph_to_g6(SmallGraph.path(4)) == "Ch"

    def test_decode_header(self):
        g = g6_to_graph(">>graph6<<C~")
        assert g.edge_count() == 6


def test_round_trip_random_graphs():
    rng = random.Random(99)
    for _ in range(300):
        n = rng.randint(0, 20)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3]
        g = SmallGraph.from_edges(n, edges)
        assert g6_to_graph(graph_to_g6(g)) == g


def test_round_trip_large_orders():
    rng = random.Random(5)
    for n in (63, 100, 200):
        rows = [0] * n
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < 0.05:
                    rows[u] |= 1 << v
                    rows[v] |= 1 << u
        text = encode_graph6(rows)
        n2, rows2 = decode_graph6(text)
        assert (n2, rows2) == (n, rows)


def test_matches_networkx_encoding():
    nx = pytest.importorskip("networkx")
    rng = random.Random(1234)
    for _ in range(100):
        n = rng.randint(1, 15)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
        g = SmallGraph.from_edges(n, edges)
        gx = nx.Graph()
        gx.add_nodes_from(range(n))
        gx.add_edges_from(edges)
        expected = nx.to_graph6_bytes(gx, header=False).decode().strip()
        assert graph_to_g6(g) == expected


def test_truncated_input_raises():
    with pytest.raises(ValueError):
        decode_graph6("D")
