from fractions import Fraction

import pytest

from diamsearch import fixtures
from diamsearch.builder import (
    ConstructionSpec,
    build_construction,
    cap_ends,
    concatenate,
    concatenate_layered,
    rotate_block,
    rotation_for_capping,
    verify_construction,
)
from diamsearch.canonical import canonical_key
from diamsearch.clump import ClumpMatrix, expand_to_graph, expansion_colours
from diamsearch.graphs import SmallGraph, rows_have_k4, rows_min_degree
from diamsearch.layered import LayeredGraph, diameter


def interface_gadget() -> LayeredGraph:
    """Five-layer repeatable graph with layer sizes (3,2,1,3,2)."""
    edges = [
        (0, 1), (1, 2),          # first layer path a1-a2-a3
        (3, 4),                  # second layer edge b1-b2
        (0, 3), (1, 4), (2, 4),  # cross to second layer
        (3, 5), (4, 5),          # cone to the middle vertex
        (5, 6), (5, 7), (5, 8),  # middle to fourth layer
        (6, 7), (7, 8),          # fourth layer path
        (9, 10),                 # last layer edge
        (6, 9), (7, 10), (8, 10),
    ]
    g = SmallGraph.from_edges(11, edges)
    return LayeredGraph(11, g.rows, [[0, 1, 2], [3, 4], [5], [6, 7, 8], [9, 10]])


class TestConcatenateLayered:
    def test_doubling_the_gadget_matches_direct_construction(self):
        lg = interface_gadget()
        out = concatenate_layered(lg, 2, 3)
        assert out.layer_sizes() == [3, 2, 1, 3, 2, 1, 3, 2]
        out.check_layering()
        # doubled graph is again repeatable
        from diamsearch.omega_search import verify_repeatable

        assert verify_repeatable(out, 3)

    def test_triple_keeps_interior_degrees(self):
        lg = interface_gadget()
        out = concatenate_layered(lg, 3, 3)
        assert out.layer_sizes() == [3, 2, 1, 3, 2, 1, 3, 2, 1, 3, 2]
        boundary = set(out.layers[0]) | set(out.layers[-1])
        for v in range(out.n):
            if v not in boundary:
                assert out.rows[v].bit_count() >= 3

    def test_single_repetition_is_identity(self):
        lg = interface_gadget()
        out = concatenate_layered(lg, 1, 3)
        assert out.rows == lg.rows

    def test_non_repeatable_input_rejected(self):
        g = SmallGraph.path(4)
        lg = LayeredGraph(4, g.rows, [[0], [1], [2], [3]])
        with pytest.raises(ValueError):
            concatenate_layered(lg, 2, 3)


class TestConcatenateBlocks:
    def test_delta4_three_reps(self):
        spec = ConstructionSpec(fixtures.load_block("delta4"), 3, 4)
        lg = concatenate(spec)
        assert lg.n == 21
        assert len(lg.layers) == 12

    def test_infeasible_block_rejected(self):
        bad = ClumpMatrix(3, [(1, 0, 0), (0, 1, 1)], "block")
        with pytest.raises(ValueError, match="infeasible"):
            concatenate(ConstructionSpec(bad, 2, 4))


class TestCapEnds:
    def test_capped_delta4_single_block(self):
        block = fixtures.load_block("delta4")
        lg, colours = build_construction(block, 1, 4, cap=True, mode="chi")
        assert lg.n == 7 + 16
        assert rows_min_degree(lg.rows) >= 4
        assert not rows_have_k4(lg.rows)
        from diamsearch.builder import _valid_colouring

        assert colours is not None and _valid_colouring(lg.rows, colours)

    def test_capped_delta8_two_reps_is_3_colourable(self):
        block = fixtures.load_block("delta8_t1")
        lg, colours = build_construction(block, 2, 8, cap=True, mode="chi")
        from diamsearch.builder import _valid_colouring

        assert _valid_colouring(lg.rows, colours)
        assert rows_min_degree(lg.rows) >= 8

    def test_capping_single_independent_layer(self):
        lg = LayeredGraph(4, [0, 0, 0, 0], [[0, 1, 2, 3]])
        out, _ = cap_ends(lg, 4, None)
        assert rows_min_degree(out.rows) >= 4

    def test_rotation_for_capping(self):
        block = fixtures.load_block("delta5")
        r = rotation_for_capping(block)
        rotated = rotate_block(block, r)
        assert sum(1 for x in rotated.columns[0] if x) < 3
        assert sum(1 for x in rotated.columns[-1] if x) < 3


class TestVerifyConstruction:
    def test_diameter_progression_delta4(self):
        block = fixtures.load_block("delta4")
        diams = []
        orders = []
        for reps in (2, 3, 4):
            lg = expand_to_graph(block, reps)
            rep = verify_construction(lg.rows, 4, "chi",
                                      colours=expansion_colours(block, reps))
            diams.append(rep.diameter)
            orders.append(rep.n)
            assert rep.constraint_ok
        assert diams[1] - diams[0] == 4 and diams[2] - diams[1] == 4
        assert orders[1] - orders[0] == 7 and orders[2] - orders[1] == 7

    def test_capped_diameter_constant_delta4(self):
        # capped m-repetition build has diameter 4m + 3
        block = fixtures.load_block("delta4")
        for reps in (1, 2, 3, 4):
            lg, colours = build_construction(block, reps, 4, cap=True, mode="chi")
            rep = verify_construction(lg.rows, 4, "chi", colours=colours)
            assert rep.ok
            assert rep.diameter == 4 * reps + 3

    def test_failed_report_not_exception(self):
        g = SmallGraph.complete(5)  # contains K4, min degree 4
        rep = verify_construction(list(g.rows), 4, "omega")
        assert not rep.ok and not rep.constraint_ok
        assert "K4" in rep.notes[0]

    def test_sharpness_margin_delta4(self):
        # diameter >= floor(4(n-4)/7) - c0 for a small measured constant c0
        block = fixtures.load_block("delta4")
        margins = []
        for reps in (2, 3, 4, 5):
            lg, colours = build_construction(block, reps, 4, cap=True, mode="chi")
            rep = verify_construction(lg.rows, 4, "chi", colours=colours)
            margins.append((4 * (rep.n - 4) // 7) - rep.diameter)
        assert max(margins) <= 15  # frozen regression constant
        assert margins == sorted(margins)  # cap overhead is one-off, gap stays fixed


def test_mode_chi_large_graph_uses_certificate():
    block = fixtures.load_block("delta16")
    lg, colours = build_construction(block, 2, 16, cap=True, mode="chi")
    assert lg.n == 2 * 216 + 4 * 16
    rep = verify_construction(lg.rows, 16, "chi", colours=colours)
    assert rep.ok
    assert rep.diameter >= 62


def test_delta16_progression():
    block = fixtures.load_block("delta16")
    d2 = diameter(expand_to_graph(block, 2))
    d3 = diameter(expand_to_graph(block, 3))
    assert d3 - d2 == 31
    assert expand_to_graph(block, 3).n - expand_to_graph(block, 2).n == 216
