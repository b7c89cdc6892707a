from fractions import Fraction
from math import ceil

import pytest

from diamsearch import fixtures
from diamsearch.clump import (
    ClumpMatrix,
    ColorPermutation,
    block_ratio,
    block_violations,
    canonical_cyclic_form,
    checked_block_ratio,
    expand_to_graph,
    expansion_colours,
    interior_degree,
    is_feasible_block,
    parse_matrix,
    repeatable_permutation,
    unroll_block,
)
from diamsearch.graphs import rows_have_k4, rows_three_colorable
from diamsearch.layered import diameter

DELTA4 = [(1, 0, 0), (0, 1, 1), (2, 0, 0), (0, 1, 1)]

EXPECTED_RATIOS = {
    "delta4": Fraction(4, 7),
    "delta5": Fraction(5, 11),
    "delta6": Fraction(14, 37),
    "delta7": Fraction(17, 52),
    "delta8_t1": Fraction(2, 7),
    "delta8_t2": Fraction(2, 7),
    "delta8_t3": Fraction(2, 7),
    "delta16": Fraction(31, 216),
}


class TestMatrixBasics:
    def test_rejects_all_zero_column(self):
        with pytest.raises(ValueError, match="all zeros"):
            ClumpMatrix(3, [(1, 0, 0), (0, 0, 0)])

    def test_rejects_bad_row_length(self):
        with pytest.raises(ValueError):
            ClumpMatrix(3, [(1, 0)])

    def test_parse_serialize_round_trip(self):
        m = ClumpMatrix(3, DELTA4, "block")
        assert parse_matrix(m.serialize()) == m

    def test_parse_rejects_missing_header(self):
        with pytest.raises(ValueError):
            parse_matrix("1 0\n0 1\n0 1\n")


class TestInteriorDegree:
    def test_delta4_block_first_column(self):
        m = ClumpMatrix(3, DELTA4, "block")
        assert interior_degree(m, 0, 0) == 4

    def test_delta4_block_third_column(self):
        m = ClumpMatrix(3, DELTA4, "block")
        assert interior_degree(m, 2, 0) == 4

    def test_single_column_triangle(self):
        m = ClumpMatrix(3, [(1, 1, 1)], "repeatable")
        assert interior_degree(m, 0, 0) == 2

    def test_empty_class_errors(self):
        m = ClumpMatrix(3, DELTA4, "block")
        with pytest.raises(ValueError, match="empty class"):
            interior_degree(m, 0, 1)

    def test_matches_expansion_neighbour_counts(self):
        # degree formula against explicit expansions, all blocks up to 40 vertices
        for name in fixtures.BLOCK_NAMES:
            m = fixtures.load_block(name)
            if m.total() > 40:
                continue
            lg = expand_to_graph(m, 2)  # middle copy gives every column interior context
            colours = expansion_colours(m, 2)
            p = m.ncols
            for j in range(p, 2 * p - 1):
                for v in lg.layers[j]:
                    if j == 2 * p - 1:
                        continue
                    expect = interior_degree(m, j % p, colours[v])
                    assert lg.rows[v].bit_count() == expect


class TestFeasibility:
    def test_delta5_fixture_is_feasible(self):
        assert is_feasible_block(fixtures.load_block("delta5"), 5)

    def test_delta8_t_variants(self):
        for t in (1, 2, 3):
            assert is_feasible_block(fixtures.load_block(f"delta8_t{t}"), 8)

    def test_delta8_not_feasible_at_9(self):
        m = fixtures.load_block("delta8_t1")
        assert not is_feasible_block(m, 9)
        kinds = {k for k, *_ in block_violations(m, 9)}
        assert kinds == {"degree"}

    def test_all_fixtures_feasible_at_their_delta(self):
        for name in fixtures.BLOCK_NAMES:
            m = fixtures.load_block(name)
            assert is_feasible_block(m, fixtures.BLOCK_DELTA[name]), name

    def test_violations_report_column_colour_degree(self):
        m = ClumpMatrix(3, [(1, 0, 0), (0, 1, 1)], "block")
        vio = block_violations(m, 4)
        assert ("degree", 1, 1, 3) in vio and ("degree", 1, 2, 3) in vio


class TestBlockRatio:
    def test_published_ratios(self):
        for name, expected in EXPECTED_RATIOS.items():
            m = fixtures.load_block(name)
            assert checked_block_ratio(m, fixtures.BLOCK_DELTA[name]) == expected, name

    def test_counterexample_margin(self):
        assert EXPECTED_RATIOS["delta16"] > Fraction(1, 7)

    def test_upper_bound_seven_over_three_delta(self):
        for name in fixtures.BLOCK_NAMES:
            d = fixtures.BLOCK_DELTA[name]
            assert block_ratio(fixtures.load_block(name)) <= Fraction(7, 3 * d), name

    def test_infeasible_block_errors(self):
        m = ClumpMatrix(3, [(1, 0, 0), (0, 1, 1)], "block")
        with pytest.raises(ValueError, match="infeasible"):
            checked_block_ratio(m, 4)


class TestColourWindowTheorems:
    def test_three_colour_columns_force_large_windows(self):
        # c(j)=3 forces S[j-1]+S[j]+S[j+1] >= ceil(3*delta/2); vacuous on most fixtures
        for name in fixtures.BLOCK_NAMES:
            m = fixtures.load_block(name)
            d = fixtures.BLOCK_DELTA[name]
            sums = m.column_sums()
            p = m.ncols
            for j in range(p):
                if m.colours_present(j) == 3:
                    window = sums[(j - 1) % p] + sums[j] + sums[(j + 1) % p]
                    assert window >= ceil(3 * d / 2)

    def test_three_colour_columns_have_two_colour_neighbours(self):
        for name in fixtures.BLOCK_NAMES:
            m = fixtures.load_block(name)
            p = m.ncols
            for j in range(p):
                if m.colours_present(j) == 3:
                    assert m.colours_present((j - 1) % p) >= 2
                    assert m.colours_present((j + 1) % p) >= 2


class TestExpansion:
    def test_single_column_triangle(self):
        m = ClumpMatrix(3, [(1, 1, 1)], "repeatable")
        lg = expand_to_graph(m)
        assert lg.n == 3
        assert all(row.bit_count() == 2 for row in lg.rows)

    def test_delta4_block_single_repetition(self):
        m = fixtures.load_block("delta4")
        lg = expand_to_graph(m)
        assert lg.n == 7
        assert not rows_have_k4(lg.rows)
        assert rows_three_colorable(lg.rows)

    def test_delta16_block_order(self):
        lg = expand_to_graph(fixtures.load_block("delta16"))
        assert lg.n == 216

    def test_expansions_are_k4_free_and_3_colourable(self):
        for name in ("delta4", "delta5", "delta6", "delta8_t1"):
            lg = expand_to_graph(fixtures.load_block(name), 2)
            assert not rows_have_k4(lg.rows)
            assert rows_three_colorable(lg.rows, limit=210)

    def test_expansion_layering_is_valid(self):
        for name in ("delta4", "delta5", "delta7"):
            expand_to_graph(fixtures.load_block(name), 2).check_layering()

    def test_repeating_non_block_rejected(self):
        m = ClumpMatrix(3, [(1, 1, 1)], "repeatable")
        with pytest.raises(ValueError):
            expand_to_graph(m, 2)

    def test_delta4_twice_layer_sizes_match_column_sums(self):
        m = fixtures.load_block("delta4")
        lg = expand_to_graph(m, 2)
        assert lg.layer_sizes() == [1, 2, 2, 2, 1, 2, 2, 2]

    def test_missing_edge_between_adjacent_triples(self):
        # the two sum-3 columns of the delta5 block share a colour class, so
        # their cross join is complete bipartite minus exactly one pair
        m = fixtures.load_block("delta5")
        cols = m.columns
        assert cols[4] == (1, 2, 0) and cols[5] == (1, 0, 2)
        lg = expand_to_graph(m)
        a, b = lg.layers[4], lg.layers[5]
        cross = sum(1 for u in a for v in b if lg.rows[u] >> v & 1)
        assert cross == len(a) * len(b) - 1


class TestRepeatablePermutation:
    def test_printed_delta4_presentation_identity(self):
        m = fixtures.load_repeatable("delta4")
        cp = repeatable_permutation(m)
        assert cp is not None
        assert cp.perm == (0, 1, 2)
        assert cp.period == 4

    def test_printed_delta5_presentation_identity(self):
        m = fixtures.load_repeatable("delta5")
        cp = repeatable_permutation(m)
        assert cp is not None
        assert cp.perm == (0, 1, 2)
        assert cp.period == 10

    def test_row_swap_seam(self):
        cols = [(1, 0, 0), (0, 1, 1), (0, 1, 0), (1, 0, 0), (0, 1, 1)]
        # build period-3 sequence twisted by swapping colours 0 and 1
        swap = ColorPermutation((1, 0, 2))
        base = [(1, 0, 0), (0, 2, 1), (2, 0, 0)]
        seq = base + [swap.apply(c) for c in base[:2]]
        m = ClumpMatrix(3, seq, "repeatable")
        cp = repeatable_permutation(m)
        assert cp is not None
        assert cp.period == 3
        assert cp.perm == (1, 0, 2)

    def test_mismatched_sums_give_none(self):
        m = ClumpMatrix(3, [(1, 0, 0), (0, 2, 0), (3, 0, 0), (0, 0, 4), (5, 0, 0)], "repeatable")
        assert repeatable_permutation(m) is None


class TestUnroll:
    def test_identity_unroll_is_same_block(self):
        m = fixtures.load_block("delta4")
        out = unroll_block(m.columns, ColorPermutation((0, 1, 2)), 3)
        assert out.columns == m.columns

    def test_swap_unroll_doubles_and_stays_feasible(self):
        base = [(1, 0, 0), (0, 2, 2), (0, 1, 0), (2, 0, 2)]
        swap = ColorPermutation((1, 0, 2))
        out = unroll_block(base, swap, 3)
        assert out.ncols == 8
        assert block_ratio(out) == Fraction(len(base), sum(sum(c) for c in base))

    def test_canonical_cyclic_form_invariant_under_rotation(self):
        m = fixtures.load_block("delta5")
        rotated = ClumpMatrix(3, m.columns[3:] + m.columns[:3], "block")
        assert canonical_cyclic_form(m) == canonical_cyclic_form(rotated)


def test_diameter_of_capless_expansions_grows_by_period():
    m = fixtures.load_block("delta4")
    d2 = diameter(expand_to_graph(m, 2))
    d3 = diameter(expand_to_graph(m, 3))
    d4 = diameter(expand_to_graph(m, 4))
    assert d3 - d2 == 4 and d4 - d3 == 4
