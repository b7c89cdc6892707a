import random

import pytest

from diamsearch.graphs import (
    SmallGraph,
    chromatic_at_most,
    clique_number,
    connected,
    has_clique,
    is_k4_free,
    is_triangle_free,
)


def tripartite(*parts: int) -> SmallGraph:
    """Complete multipartite graph with the given part sizes."""
    n = sum(parts)
    bounds = []
    start = 0
    for p in parts:
        bounds.append((start, start + p))
        start += p
    edges = []
    for i, (a0, a1) in enumerate(bounds):
        for b0, b1 in bounds[i + 1:]:
            for u in range(a0, a1):
                for v in range(b0, b1):
                    edges.append((u, v))
    return SmallGraph.from_edges(n, edges)


PETERSEN = SmallGraph.from_edges(10, [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
])


class TestConstruction:
    def test_rejects_asymmetric_rows(self):
        with pytest.raises(ValueError):
            SmallGraph(2, [0b10, 0b00])

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            SmallGraph.from_edges(2, [(0, 0)])

    def test_rejects_order_above_32(self):
        with pytest.raises(ValueError):
            SmallGraph.empty(33)

    def test_complete_bipartite_degrees(self):
        g = SmallGraph.complete_bipartite(3, 4)
        assert sorted(g.degrees()) == [3, 3, 3, 3, 4, 4, 4]

    def test_subgraph_keeps_induced_edges(self):
        g = SmallGraph.cycle(5)
        h = g.subgraph([0, 1, 3])
        assert h.edges() == [(0, 1)]


class TestCliqueNumber:
    def test_complete_graph(self):
        assert clique_number(SmallGraph.complete(4)) == 4

    def test_odd_cycle(self):
        assert clique_number(SmallGraph.cycle(5)) == 2

    def test_balanced_tripartite_8(self):
        assert clique_number(tripartite(3, 3, 2)) == 3

    def test_empty_graph(self):
        assert clique_number(SmallGraph.empty(0)) == 0

    def test_matches_brute_force_on_random_graphs(self):
        from diamsearch.oracle import naive_clique_number

        rng = random.Random(42)
        for _ in range(200):
            n = rng.randint(1, 9)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
            g = SmallGraph.from_edges(n, edges)
            assert clique_number(g) == naive_clique_number(g)


class TestK4Free:
    def test_k4_itself(self):
        assert not is_k4_free(SmallGraph.complete(4))

    def test_complete_bipartite(self):
        assert is_k4_free(SmallGraph.complete_bipartite(3, 3))

    def test_tripartite_expansion_is_k4_free(self):
        assert is_k4_free(tripartite(4, 4, 4))

    def test_triangle_free(self):
        assert is_triangle_free(SmallGraph.cycle(4))
        assert not is_triangle_free(SmallGraph.complete(3))

    def test_has_clique_edge_cases(self):
        g = SmallGraph.empty(3)
        assert has_clique(g, 1)
        assert not has_clique(g, 2)


class TestChromatic:
    def test_c5_is_3_colourable(self):
        assert chromatic_at_most(SmallGraph.cycle(5), 3)
        assert not chromatic_at_most(SmallGraph.cycle(5), 2)

    def test_k4_needs_4(self):
        assert not chromatic_at_most(SmallGraph.complete(4), 3)
        assert chromatic_at_most(SmallGraph.complete(4), 4)

    def test_petersen_is_3_colourable(self):
        assert chromatic_at_most(PETERSEN, 3)
        assert not chromatic_at_most(PETERSEN, 2)

    def test_bipartite(self):
        assert chromatic_at_most(SmallGraph.complete_bipartite(5, 5), 2)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            chromatic_at_most(SmallGraph.empty(1), 0)


def test_colourable_implies_clique_bound_on_all_small_graphs():
    # proper k-colouring forces clique number <= k
    from diamsearch.enumeration import enumerate_layer_graphs

    for g in enumerate_layer_graphs(6):
        w = clique_number(g)
        for k in range(1, 5):
            if chromatic_at_most(g, k):
                assert w <= k


def test_connected():
    assert connected(SmallGraph.cycle(4))
    assert not connected(SmallGraph.empty(2))
    assert connected(SmallGraph.empty(1))
