import random
from itertools import permutations

from diamsearch.canonical import (
    are_isomorphic,
    canonical_form,
    canonical_key,
    layered_isomorphic,
    two_layer_graph,
)
from diamsearch.graphs import SmallGraph


def brute_force_isomorphic(g1, g2, labels1=None, labels2=None):
    if g1.n != g2.n:
        return False
    labels1 = labels1 or [0] * g1.n
    labels2 = labels2 or [0] * g2.n
    for perm in permutations(range(g1.n)):
        if any(labels1[v] != labels2[perm[v]] for v in range(g1.n)):
            continue
        if g1.relabel(perm).rows == g2.rows:
            return True
    return False


class TestLabelledKeys:
    def test_path_reversal_same_key(self):
        p3 = SmallGraph.path(3)
        assert canonical_key(p3, (0, 0, 0)) == canonical_key(p3.relabel([2, 1, 0]), (0, 0, 0))

    def test_path_end_labels_mirror(self):
        p3 = SmallGraph.path(3)
        assert canonical_key(p3, (1, 0, 0)) == canonical_key(p3, (0, 0, 1))

    def test_k3_vs_p3_distinct(self):
        assert canonical_key(SmallGraph.complete(3)) != canonical_key(SmallGraph.path(3))

    def test_labels_break_symmetry(self):
        p3 = SmallGraph.path(3)
        assert canonical_key(p3, (1, 0, 0)) != canonical_key(p3, (0, 1, 0))

    def test_invariant_under_random_relabelling(self):
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(1, 8)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
            g = SmallGraph.from_edges(n, edges)
            labels = [rng.randint(0, 2) for _ in range(n)]
            perm = list(range(n))
            rng.shuffle(perm)
            g2 = g.relabel(perm)
            labels2 = [0] * n
            for v in range(n):
                labels2[perm[v]] = labels[v]
            assert canonical_key(g, labels) == canonical_key(g2, labels2)

    def test_canonical_form_order_realises_key(self):
        g = SmallGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])
        key, order = canonical_form(g)
        rep = g.subgraph(list(order))
        key2, order2 = canonical_form(rep)
        assert key == key2
        assert rep.subgraph(list(order2)).rows == rep.rows or canonical_key(rep) == key


def test_agrees_with_factorial_search_on_all_graphs_up_to_6():
    # key equality must coincide with explicit isomorphism search
    from diamsearch.enumeration import enumerate_layer_graphs

    classes = enumerate_layer_graphs(5)
    keys = [canonical_key(g) for g in classes]
    for i in range(len(classes)):
        for j in range(i, len(classes)):
            same_key = keys[i] == keys[j]
            same_iso = brute_force_isomorphic(classes[i], classes[j])
            assert same_key == same_iso, (classes[i], classes[j])


def test_labelled_agreement_random_pairs_n6():
    rng = random.Random(13)
    for _ in range(150):
        n = 6
        e1 = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
        e2 = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
        g1 = SmallGraph.from_edges(n, e1)
        g2 = SmallGraph.from_edges(n, e2)
        l1 = [rng.randint(0, 1) for _ in range(n)]
        l2 = [rng.randint(0, 1) for _ in range(n)]
        assert (canonical_key(g1, l1) == canonical_key(g2, l2)) == brute_force_isomorphic(
            g1, g2, l1, l2
        )


class TestLayeredIsomorphic:
    def test_cone_over_two_vertices_vs_itself(self):
        k1 = SmallGraph.empty(1)
        two = SmallGraph.empty(2)
        cross = 0b11  # single g_a vertex joined to both g_b vertices
        assert layered_isomorphic((k1, two, cross), (k1, two, cross))

    def test_swapped_layer_sizes_differ(self):
        k1 = SmallGraph.empty(1)
        two = SmallGraph.empty(2)
        assert not layered_isomorphic((two, k1, 0b11), (k1, two, 0b11))

    def test_two_layer_graph_assembly(self):
        a = SmallGraph.complete(2)
        b = SmallGraph.empty(2)
        # cross bit a*nb+b: join a0-b0 and a1-b1
        joint = two_layer_graph(a, b, 0b1001)
        assert sorted(joint.edges()) == [(0, 1), (0, 2), (1, 3)]

    def test_cross_pattern_matters(self):
        a = SmallGraph.empty(2)
        b = SmallGraph.empty(2)
        full = 0b1111
        matching = 0b1001
        assert not layered_isomorphic((a, b, full), (a, b, matching))


def test_are_isomorphic_smoke():
    c6 = SmallGraph.cycle(6)
    two_triangles = SmallGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert not are_isomorphic(c6, two_triangles)
    assert are_isomorphic(c6, c6.relabel([3, 0, 5, 1, 4, 2]))
