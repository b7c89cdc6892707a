"""Layered graphs: BFS layer decompositions, diameter, large-graph adjacency.

A LayeredGraph couples adjacency rows with an ordered partition into layers
N_0..N_d where edges only run within a layer or between consecutive layers
and every vertex of N_i (i >= 1) has a neighbour in N_{i-1}; that makes the
layers exactly the distance-i sets from N_0.  Adjacency rows are plain int
bitmasks, so the same code serves SmallGraph instances (n <= 32) and big
built constructions (thousands of vertices).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .graphs import SmallGraph, bits


class LayeredGraph:
    """Adjacency rows plus an ordered vertex partition into layers."""

    __slots__ = ("n", "rows", "layers")

    def __init__(self, n: int, rows: Sequence[int], layers: Sequence[Sequence[int]]):
        self.n = n
        self.rows = list(rows)
        self.layers = [list(layer) for layer in layers]

    @property
    def depth(self) -> int:
        """Index d of the last layer."""
        return len(self.layers) - 1

    def layer_sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    def layer_of(self) -> list[int]:
        out = [-1] * self.n
        for i, layer in enumerate(self.layers):
            for v in layer:
                out[v] = i
        return out

    def order(self) -> int:
        return self.n

    def interior_order(self) -> int:
        return self.n - len(self.layers[0]) - len(self.layers[-1])

    def small_graph(self) -> SmallGraph:
        if self.n > 32:
            raise ValueError("graph too large for SmallGraph view")
        return SmallGraph(self.n, self.rows)

    def check_layering(self) -> None:
        """Raise ValueError unless the layer structure is a valid BFS layering."""
        seen: set[int] = set()
        for layer in self.layers:
            for v in layer:
                if v in seen:
                    raise ValueError(f"vertex {v} in two layers")
                seen.add(v)
        if len(seen) != self.n:
            raise ValueError("layers do not cover all vertices")
        where = self.layer_of()
        for v in range(self.n):
            for u in bits(self.rows[v]):
                if abs(where[u] - where[v]) > 1:
                    raise ValueError(f"edge ({v},{u}) skips layers")
        for i in range(1, len(self.layers)):
            prev_mask = 0
            for v in self.layers[i - 1]:
                prev_mask |= 1 << v
            for v in self.layers[i]:
                if not self.rows[v] & prev_mask:
                    raise ValueError(f"vertex {v} in layer {i} has no neighbour in layer {i - 1}")

    def __repr__(self) -> str:
        return f"LayeredGraph(n={self.n}, layer_sizes={self.layer_sizes()})"


def bfs_layers(g: SmallGraph, source: Iterable[int]) -> LayeredGraph:
    """Distance layers from a source set; error if some vertex is unreachable."""
    src = list(source)
    if not src:
        raise ValueError("source must be non-empty")
    seen = 0
    for v in src:
        seen |= 1 << v
    layers = [sorted(src)]
    frontier = seen
    while True:
        nxt = 0
        for v in bits(frontier):
            nxt |= g.rows[v]
        frontier = nxt & ~seen
        if not frontier:
            break
        seen |= frontier
        layers.append(sorted(bits(frontier)))
    if seen != (1 << g.n) - 1:
        raise ValueError("disconnected: some vertex unreachable from source")
    return LayeredGraph(g.n, g.rows, layers)


def eccentricity(rows: Sequence[int], source: int, n: int) -> int:
    seen = 1 << source
    frontier = seen
    dist = 0
    while True:
        nxt = 0
        for v in bits(frontier):
            nxt |= rows[v]
        frontier = nxt & ~seen
        if not frontier:
            break
        seen |= frontier
        dist += 1
    if seen != (1 << n) - 1:
        raise ValueError("disconnected")
    return dist


def diameter(graph: SmallGraph | LayeredGraph | Sequence[int], workers: int = 1) -> int:
    """Max eccentricity over all sources (all-sources BFS on bitmask rows)."""
    if isinstance(graph, SmallGraph):
        rows, n = graph.rows, graph.n
    elif isinstance(graph, LayeredGraph):
        rows, n = graph.rows, graph.n
    else:
        rows, n = list(graph), len(graph)
    if n == 0:
        raise ValueError("diameter of empty graph")
    if workers > 1 and n >= 512:
        return _diameter_parallel(rows, n, workers)
    return max(eccentricity(rows, v, n) for v in range(n))


def _diameter_parallel(rows: Sequence[int], n: int, workers: int) -> int:
    from concurrent.futures import ProcessPoolExecutor

    chunk = max(1, (n + workers - 1) // workers)
    ranges = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_ecc_range, [(list(rows), n, a, b) for a, b in ranges])
        return max(parts)


def _ecc_range(args: tuple[list[int], int, int, int]) -> int:
    rows, n, a, b = args
    return max(eccentricity(rows, v, n) for v in range(a, b))


def write_edge_list(rows: Sequence[int], path: str) -> None:
    with open(path, "w") as fh:
        for v in range(len(rows)):
            row = rows[v] >> (v + 1) << (v + 1)
            for u in bits(row):
                fh.write(f"{v} {u}\n")


def read_edge_list(path: str) -> list[int]:
    edges = []
    top = -1
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = map(int, line.split())
            edges.append((u, v))
            top = max(top, u, v)
    rows = [0] * (top + 1)
    for u, v in edges:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows
