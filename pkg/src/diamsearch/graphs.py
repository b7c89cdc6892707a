"""Small undirected graphs on bitmask adjacency rows.

Vertices are 0..n-1 with n <= 32, so each adjacency row fits in a single
machine word.  All operations are pure; a SmallGraph is never mutated after
construction.  Larger graphs (built constructions) are handled as raw
adjacency-row lists by :mod:`diamsearch.layered`.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

MAX_VERTICES = 32


class SmallGraph:
    """Simple undirected graph, adjacency stored as one int bitmask per vertex."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        if not 0 <= n <= MAX_VERTICES:
            raise ValueError(f"order {n} out of range 0..{MAX_VERTICES}")
        if len(rows) != n:
            raise ValueError("row count does not match order")
        full = (1 << n) - 1
        for v, row in enumerate(rows):
            if row & ~full:
                raise ValueError(f"row {v} has bits outside 0..{n - 1}")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
        for v in range(n):
            for u in _bits(rows[v]):
                if not rows[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at ({v},{u})")
        self.n = n
        self.rows = tuple(rows)

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "SmallGraph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return SmallGraph(n, rows)

    @staticmethod
    def empty(n: int) -> "SmallGraph":
        return SmallGraph(n, [0] * n)

    @staticmethod
    def complete(n: int) -> "SmallGraph":
        full = (1 << n) - 1
        return SmallGraph(n, [full ^ (1 << v) for v in range(n)])

    @staticmethod
    def complete_bipartite(a: int, b: int) -> "SmallGraph":
        left = (1 << a) - 1
        right = ((1 << b) - 1) << a
        rows = [right] * a + [left] * b
        return SmallGraph(a + b, rows)

    @staticmethod
    def cycle(n: int) -> "SmallGraph":
        if n < 3:
            raise ValueError("cycle needs >= 3 vertices")
        return SmallGraph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])

    @staticmethod
    def path(n: int) -> "SmallGraph":
        return SmallGraph.from_edges(n, [(v, v + 1) for v in range(n - 1)])

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.n):
            row = self.rows[v] >> (v + 1) << (v + 1)
            for u in _bits(row):
                out.append((v, u))
        return out

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> tuple[int, ...]:
        return tuple(row.bit_count() for row in self.rows)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def subgraph(self, vertices: Sequence[int]) -> "SmallGraph":
        """Induced subgraph; vertex i of the result is vertices[i]."""
        idx = {v: i for i, v in enumerate(vertices)}
        rows = [0] * len(vertices)
        for i, v in enumerate(vertices):
            for u in _bits(self.rows[v]):
                j = idx.get(u)
                if j is not None:
                    rows[i] |= 1 << j
        return SmallGraph(len(vertices), rows)

    def relabel(self, perm: Sequence[int]) -> "SmallGraph":
        """Image graph under vertex map v -> perm[v]."""
        rows = [0] * self.n
        for v in range(self.n):
            for u in _bits(self.rows[v]):
                rows[perm[v]] |= 1 << perm[u]
        return SmallGraph(self.n, rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, SmallGraph) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"SmallGraph(n={self.n}, edges={self.edges()})"


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions of a mask, ascending."""
    return _bits(mask)


def clique_number(g: SmallGraph) -> int:
    """Maximum clique size, exact branch and bound with greedy colouring bound."""
    if g.n == 0:
        return 0
    rows = g.rows
    best = 1

    def colour_order(pool: int) -> tuple[list[int], list[int]]:
        order, bounds = [], []
        colour = 0
        rest = pool
        while rest:
            colour += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                order.append(v)
                bounds.append(colour)
                rest &= ~(1 << v)
                avail &= ~rows[v] & ~(1 << v)
        return order, bounds

    def expand(size: int, pool: int) -> None:
        nonlocal best
        if pool == 0:
            if size > best:
                best = size
            return
        order, bounds = colour_order(pool)
        local = pool
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best:
                return
            v = order[i]
            bit = 1 << v
            if not local & bit:
                continue
            expand(size + 1, local & rows[v])
            local &= ~bit

    expand(0, (1 << g.n) - 1)
    return best


def has_clique(g: SmallGraph, k: int) -> bool:
    """True iff some k vertices are pairwise adjacent (early-exit search)."""
    if k <= 0:
        return True
    if k == 1:
        return g.n >= 1
    rows = g.rows

    def expand(size: int, pool: int) -> bool:
        if size == k:
            return True
        if size + pool.bit_count() < k:
            return False
        local = pool
        while local:
            v = (local & -local).bit_length() - 1
            bit = 1 << v
            if expand(size + 1, local & rows[v]):
                return True
            local &= ~bit
        return False

    return expand(0, (1 << g.n) - 1)


def is_k4_free(g: SmallGraph) -> bool:
    return not has_clique(g, 4)


def is_triangle_free(g: SmallGraph) -> bool:
    return not has_clique(g, 3)


def chromatic_at_most(g: SmallGraph, k: int) -> bool:
    """Exact proper k-colourability by backtracking.

    Vertices are processed in a connectivity-friendly order (highest degree
    first, then neighbours first); a fresh colour may only be opened as
    colour max_used+1, which kills colour-permutation symmetry.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    if n == 0:
        return True
    if k >= n:
        return True
    rows = g.rows

    order: list[int] = []
    placed = 0
    degs = g.degrees()
    while len(order) < n:
        cands = [v for v in range(n) if not placed >> v & 1]
        # prefer vertices with most already-placed neighbours, then high degree
        v = max(cands, key=lambda v: ((rows[v] & placed).bit_count(), degs[v], -v))
        order.append(v)
        placed |= 1 << v

    colours = [-1] * n

    def assign(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        seen = 0
        for u in _bits(rows[v]):
            if colours[u] >= 0:
                seen |= 1 << colours[u]
        limit = min(used + 1, k)
        for c in range(limit):
            if seen >> c & 1:
                continue
            colours[v] = c
            if assign(i + 1, max(used, c + 1)):
                return True
            colours[v] = -1
        return False

    return assign(0, 0)


def connected(g: SmallGraph) -> bool:
    if g.n == 0:
        return True
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.rows[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << g.n) - 1


def rows_have_k4(rows: Sequence[int]) -> bool:
    """K4 test on raw adjacency rows of any size.

    For each edge (u,v), a K4 through it needs an edge inside the common
    neighbourhood of u and v.
    """
    n = len(rows)
    for u in range(n):
        ru = rows[u] >> (u + 1) << (u + 1)
        for v in _bits(ru):
            common = rows[u] & rows[v]
            rest = common
            while rest:
                w = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if rows[w] & rest:
                    return True
    return False


def rows_min_degree(rows: Sequence[int]) -> int:
    return min(row.bit_count() for row in rows)


def rows_three_colorable(rows: Sequence[int], limit: int = 200) -> bool:
    """Exact 3-colourability on raw rows, permitted up to ``limit`` vertices."""
    n = len(rows)
    if n > limit:
        raise ValueError(f"exact 3-colouring capped at {limit} vertices")
    if n == 0:
        return True
    order: list[int] = []
    placed = 0
    degs = [row.bit_count() for row in rows]
    avail = set(range(n))
    while avail:
        v = max(avail, key=lambda v: ((rows[v] & placed).bit_count(), degs[v], -v))
        order.append(v)
        placed |= 1 << v
        avail.remove(v)
    colours = [-1] * n

    def assign(i: int, used: int) -> bool:
        if i == n:
            return True
        v = order[i]
        seen = 0
        for u in _bits(rows[v]):
            if colours[u] >= 0:
                seen |= 1 << colours[u]
        for c in range(min(used + 1, 3)):
            if seen >> c & 1:
                continue
            colours[v] = c
            if assign(i + 1, max(used, c + 1)):
                return True
            colours[v] = -1
        return False

    return assign(0, 0)
