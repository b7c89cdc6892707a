from diamsearch.canonical import canonical_key
from diamsearch.enumeration import enumerate_layer_graphs
from diamsearch.graphs import SmallGraph, is_k4_free

# numbers of isomorphism classes of simple graphs on n vertices
CLASS_COUNTS = {1: 1, 2: 2, 3: 4, 4: 11, 5: 34, 6: 156, 7: 1044}


def brute_force_class_count(n: int) -> int:
    seen = set()
    for mask in range(1 << (n * (n - 1) // 2)):
        edges = []
        idx = 0
        for u in range(n):
            for v in range(u + 1, n):
                if mask >> idx & 1:
                    edges.append((u, v))
                idx += 1
        seen.add(canonical_key(SmallGraph.from_edges(n, edges)).data)
    return len(seen)


def test_counts_match_brute_force_dedup():
    for n in range(1, 6):
        assert brute_force_class_count(n) == CLASS_COUNTS[n]


def test_n_max_3_gives_7_classes():
    assert len(enumerate_layer_graphs(3)) == 1 + 2 + 4


def test_n_max_4_gives_18_classes():
    assert len(enumerate_layer_graphs(4)) == 18


def test_n_max_4_k4_free_gives_17():
    assert len(enumerate_layer_graphs(4, predicate=is_k4_free)) == 17


def test_counts_up_to_7():
    got = enumerate_layer_graphs(7)
    by_size = {}
    for g in got:
        by_size[g.n] = by_size.get(g.n, 0) + 1
    assert by_size == CLASS_COUNTS


def test_hereditary_pruning_matches_post_filter():
    plain = enumerate_layer_graphs(6, predicate=is_k4_free)
    pruned = enumerate_layer_graphs(6, predicate=is_k4_free, hereditary=True)
    assert [canonical_key(g).data for g in plain] == [canonical_key(g).data for g in pruned]


def test_representatives_are_pairwise_non_isomorphic():
    got = enumerate_layer_graphs(5)
    keys = {canonical_key(g).data for g in got}
    assert len(keys) == len(got)


def test_deterministic_order():
    a = enumerate_layer_graphs(5)
    b = enumerate_layer_graphs(5)
    assert [g.rows for g in a] == [g.rows for g in b]
    sizes = [g.n for g in a]
    assert sizes == sorted(sizes)
