import random

import pytest

from diamsearch.graphs import SmallGraph
from diamsearch.layered import LayeredGraph, bfs_layers, diameter, read_edge_list, write_edge_list
from diamsearch.oracle import naive_diameter


class TestBfsLayers:
    def test_c4_from_single_vertex(self):
        lg = bfs_layers(SmallGraph.cycle(4), [0])
        assert lg.layer_sizes() == [1, 2, 1]

    def test_complete_bipartite_from_one_side(self):
        g = SmallGraph.complete_bipartite(4, 4)
        lg = bfs_layers(g, range(4))
        assert lg.layer_sizes() == [4, 4]

    def test_disconnected_raises(self):
        g = SmallGraph.empty(3)
        with pytest.raises(ValueError, match="disconnected"):
            bfs_layers(g, [0])

    def test_empty_source_raises(self):
        with pytest.raises(ValueError):
            bfs_layers(SmallGraph.cycle(3), [])

    def test_layering_invariants_on_random_connected_graphs(self):
        rng = random.Random(21)
        produced = 0
        while produced < 120:
            n = rng.randint(2, 10)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35]
            g = SmallGraph.from_edges(n, edges)
            try:
                lg = bfs_layers(g, [rng.randrange(n)])
            except ValueError:
                continue
            lg.check_layering()
            produced += 1


class TestDiameter:
    def test_path(self):
        assert diameter(SmallGraph.path(7)) == 6

    def test_c5(self):
        assert diameter(SmallGraph.cycle(5)) == 2

    def test_raw_rows_input(self):
        g = SmallGraph.cycle(8)
        assert diameter(list(g.rows)) == 4

    def test_agrees_with_floyd_warshall_on_all_small_graphs(self):
        from diamsearch.enumeration import enumerate_layer_graphs
        from diamsearch.graphs import connected

        for g in enumerate_layer_graphs(6, predicate=connected):
            assert diameter(g) == naive_diameter(g)

    def test_agrees_on_random_sweep(self):
        rng = random.Random(500)
        checked = 0
        while checked < 500:
            n = rng.randint(2, 12)
            p = rng.uniform(0.2, 0.7)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
            g = SmallGraph.from_edges(n, edges)
            try:
                d1 = diameter(g)
            except ValueError:
                continue
            assert d1 == naive_diameter(g)
            checked += 1


def test_check_layering_rejects_layer_skips():
    g = SmallGraph.path(3)  # edges (0,1), (1,2)
    bad = LayeredGraph(3, g.rows, [[0], [2], [1]])
    with pytest.raises(ValueError):
        bad.check_layering()


def test_check_layering_rejects_missing_backward_neighbour():
    g = SmallGraph.from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)])
    ok = LayeredGraph(4, g.rows, [[0], [1], [2, 3]])
    ok.check_layering()
    g2 = SmallGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    bad = LayeredGraph(4, g2.rows, [[0], [1, 3], [2]])
    with pytest.raises(ValueError):
        bad.check_layering()


def test_edge_list_round_trip(tmp_path):
    g = SmallGraph.cycle(6)
    path = tmp_path / "g.edges"
    write_edge_list(g.rows, str(path))
    rows = read_edge_list(str(path))
    assert rows == list(g.rows)
