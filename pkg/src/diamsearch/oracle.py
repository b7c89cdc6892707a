"""Brute-force reference implementations used only by tests and `selftest`.

Everything here is deliberately dumb and shares no code or data layout with
the optimised modules: graphs are adjacency matrices as nested lists, cliques
come from full subset enumeration, distances from Floyd-Warshall, and the
column search is a plain depth-first recursion with no state table.  Small
budgets keep every run finite; exceeding one raises OracleBudgetExceeded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .graphs import SmallGraph


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleBudget:
    max_vertices: int = 16
    max_period: int = 12
    max_column_sum: int = 6
    max_nodes: int = 50_000_000


def _matrix(g: SmallGraph) -> list[list[int]]:
    return [[1 if g.rows[i] >> j & 1 else 0 for j in range(g.n)] for i in range(g.n)]


def naive_clique_number(g: SmallGraph) -> int:
    """Max clique by scanning every vertex subset (n <= 16)."""
    if g.n > 16:
        raise ValueError("naive_clique_number limited to n <= 16")
    if g.n == 0:
        return 0
    adj = _matrix(g)
    best = 1
    for size in range(2, g.n + 1):
        found = False
        for subset in combinations(range(g.n), size):
            if all(adj[u][v] for u, v in combinations(subset, 2)):
                best = size
                found = True
                break
        if not found:
            break
    return best


def naive_diameter(g: SmallGraph | Sequence[int]) -> int:
    """All-pairs shortest paths by Floyd-Warshall (n <= 64)."""
    if isinstance(g, SmallGraph):
        n = g.n
        rows = g.rows
    else:
        rows = list(g)
        n = len(rows)
    if n > 64:
        raise ValueError("naive_diameter limited to n <= 64")
    if n == 0:
        raise ValueError("empty graph")
    INF = float("inf")
    dist = [[0 if i == j else (1 if rows[i] >> j & 1 else INF) for j in range(n)] for i in range(n)]
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    worst = max(max(row) for row in dist)
    if worst == INF:
        raise ValueError("disconnected")
    return int(worst)


def _joint_has_k4(adj: list[list[int]]) -> bool:
    n = len(adj)
    for quad in combinations(range(n), 4):
        if all(adj[u][v] for u, v in combinations(quad, 2)):
            return True
    return False


def naive_maximal_edge_sets(g1: SmallGraph, g2: SmallGraph) -> list[list[tuple[int, int]]]:
    """All maximal K4-free cross-edge sets by scanning all 2^(n1*n2) subsets.

    For each 4-subset of the joint vertex set the internal edges are fixed, so
    the subset becomes a K4 for exactly the masks containing its cross slots;
    the scan tests every mask against every such requirement.
    """
    n1, n2 = g1.n, g2.n
    slots = [(a, b) for a in range(n1) for b in range(n2)]
    nslots = len(slots)
    if nslots > 16:
        raise ValueError("naive_maximal_edge_sets limited to |V1|*|V2| <= 16")
    slot_index = {ab: i for i, ab in enumerate(slots)}
    adj1 = _matrix(g1)
    adj2 = _matrix(g2)

    requirements = []
    verts = [("a", v) for v in range(n1)] + [("b", v) for v in range(n2)]
    for quad in combinations(verts, 4):
        req = 0
        complete = True
        for (s1, u), (s2, v) in combinations(quad, 2):
            if s1 == s2 == "a":
                complete &= bool(adj1[u][v])
            elif s1 == s2 == "b":
                complete &= bool(adj2[u][v])
            else:
                a, b = (u, v) if s1 == "a" else (v, u)
                req |= 1 << slot_index[(a, b)]
            if not complete:
                break
        if complete:
            requirements.append(req)
    if 0 in requirements:
        return []  # a K4 already lives inside the two base graphs

    ok = bytearray(1 for _ in range(1 << nslots))
    for mask in range(1 << nslots):
        for req in requirements:
            if mask & req == req:
                ok[mask] = 0
                break
    out = []
    for mask in range(1 << nslots):
        if not ok[mask]:
            continue
        maximal = True
        for idx in range(nslots):
            if not mask >> idx & 1 and ok[mask | 1 << idx]:
                maximal = False
                break
        if maximal:
            out.append([slots[i] for i in range(nslots) if mask >> i & 1])
    return out


@dataclass
class NaiveChiResult:
    best_ratio: Fraction | None
    witness_columns: list[tuple[int, ...]] | None
    nodes: int = 0


def naive_search_chi(cfg, budget: OracleBudget | None = None) -> NaiveChiResult:
    """Depth-first column search with no state table.

    Mirrors the optimised search semantics (window degree rule, previous-layer
    adjacency rule, caps and assumption flags, repeatability across all colour
    permutations) but keeps no memory of visited configurations and no start
    canonicalisation, so state deduplication is exactly what it certifies.
    The incumbent bound is self-contained: future layers satisfy the
    consecutive-triple sum theorem and a repeatable completion must end in a
    permuted copy of the start pair.  Iterative deepening on the period finds
    incumbents early; the node budget turns runaways into explicit aborts.
    """
    budget = budget or OracleBudget()
    if cfg.max_column_sum > budget.max_column_sum:
        raise OracleBudgetExceeded("column sum cap above oracle budget")
    if cfg.max_period > budget.max_period:
        raise OracleBudgetExceeded("period bound above oracle budget")

    chi = cfg.chi
    delta = cfg.delta
    cols: list[tuple[int, ...]] = []
    for col in _columns(chi, cfg.max_column_sum, cfg.max_class_size):
        if cfg.assume_missing_color and sum(1 for x in col if x) > chi - 1:
            continue
        cols.append(col)
    cols.sort(key=lambda c: (sum(c), c))
    ncols = len(cols)
    sums = [sum(c) for c in cols]
    perms = sorted(permutations(range(chi)))

    def backward_ok(l, nxt):
        sl = sum(l)
        return all(not x or sl - l[c] >= 1 for c, x in enumerate(nxt))

    def window_ok(p, l, nxt):
        sp, sl, sn = sum(p), sum(l), sum(nxt)
        for c, x in enumerate(l):
            if x and (sp - p[c]) + (sl - x) + (sn - nxt[c]) < delta:
                return False
        return True

    # legal continuations per (prev, last) pair, precomputed once
    legal: list[list[int] | None] = [None] * (ncols * ncols)

    def nexts(p: int, l: int) -> list[int]:
        got = legal[p * ncols + l]
        if got is None:
            got = [n for n in range(ncols)
                   if backward_ok(cols[l], cols[n]) and window_ok(cols[p], cols[l], cols[n])]
            legal[p * ncols + l] = got
        return got

    # least possible total of r appended column sums: consecutive triples of
    # layer sums reach delta+1, computed over (prev sum, last sum) classes
    smax = cfg.max_column_sum
    max_r = cfg.max_period + 2
    fut = [[0] * (max_r + 1) for _ in range((smax + 1) * (smax + 1))]
    BIG = 1 << 30
    for r in range(1, max_r + 1):
        for sp in range(1, smax + 1):
            for sl in range(1, smax + 1):
                best_v = BIG
                for sn in range(1, smax + 1):
                    if sp + sl + sn < delta + 1:
                        continue
                    v = sn + fut[sl * (smax + 1) + sn][r - 1]
                    if v < best_v:
                        best_v = v
                fut[sp * (smax + 1) + sl][r] = min(best_v, BIG)

    best: list[Fraction | None] = [None]
    witness: list[list[tuple[int, ...]] | None] = [None]
    nodes = [0]

    def completion_possible(order, s01, k, sp, sl, cap) -> bool:
        row = fut[sp * (smax + 1) + sl]
        incumbent = best[0]
        for r in range(1, cap + 2 - k + 1):
            lb = row[r]
            if r >= 2:
                lb = max(lb, row[r - 2] + s01)
            ratio_num = k + r - 2
            # candidate ratio (k+r-2) / (order - s01 + lb) could beat or tie
            if ratio_num * incumbent.denominator >= (order - s01 + lb) * incumbent.numerator:
                return True
        return False

    def dfs(seq: list[int], order: int, cap: int) -> None:
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise OracleBudgetExceeded(f"node budget {budget.max_nodes} exceeded")
        k = len(seq)
        a0, a1 = seq[0], seq[1]
        s01 = sums[a0] + sums[a1]
        if k >= 4:
            pa, la = cols[seq[-2]], cols[seq[-1]]
            ca0, ca1 = cols[a0], cols[a1]
            hit = any(
                all(pa[perm[c]] == ca0[c] and la[perm[c]] == ca1[c] for c in range(chi))
                for perm in perms
            )
            if hit:
                if not cfg.require_singleton_layer or any(
                    sum(1 for x in cols[i] if x) == 1 for i in seq[1:-1]
                ):
                    ratio = Fraction(k - 2, order - s01)
                    if best[0] is None or ratio > best[0]:
                        best[0] = ratio
                        witness[0] = [cols[i] for i in seq[1:-1]]
        if k - 2 >= cap:
            return
        if best[0] is not None and not completion_possible(
                order, s01, k, sums[seq[-2]], sums[seq[-1]], cap):
            return
        for n in nexts(seq[-2], seq[-1]):
            seq.append(n)
            dfs(seq, order + sums[n], cap)
            seq.pop()

    caps = []
    c = 4
    while c < cfg.max_period:
        caps.append(c)
        c *= 2
    caps.append(cfg.max_period)
    for cap in caps:
        for a0 in range(ncols):
            for a1 in range(ncols):
                if not backward_ok(cols[a0], cols[a1]):
                    continue
                dfs([a0, a1], sums[a0] + sums[a1], cap)
    return NaiveChiResult(best[0], witness[0], nodes[0])


def _columns(chi: int, max_sum: int, max_class: int):
    def rec(prefix, remaining_slots, total):
        if remaining_slots == 0:
            if total > 0:
                yield tuple(prefix)
            return
        for x in range(0, min(max_class, max_sum - total) + 1):
            prefix.append(x)
            yield from rec(prefix, remaining_slots - 1, total + x)
            prefix.pop()

    yield from rec([], chi, 0)
