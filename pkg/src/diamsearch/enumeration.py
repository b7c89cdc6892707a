"""Isomorph-free graph enumeration by incremental vertex extension.

Each n-vertex class is produced by attaching a new vertex (every possible
neighbourhood subset) to every (n-1)-vertex class and deduplicating with
canonical keys.  A hereditary filter (one preserved by deleting the new
vertex, e.g. K4-freeness) may prune during generation without losing any
class; non-hereditary predicates are applied to the output only.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .canonical import canonical_form
from .graphs import SmallGraph


class GraphEnumerator:
    """Caches one representative per isomorphism class, size by size."""

    def __init__(self, hereditary: Callable[[SmallGraph], bool] | None = None):
        self.hereditary = hereditary
        self._by_size: dict[int, list[SmallGraph]] = {}

    def classes(self, n: int) -> list[SmallGraph]:
        """All classes on exactly n vertices (canonical representatives, sorted)."""
        if n < 0:
            raise ValueError("negative order")
        got = self._by_size.get(n)
        if got is not None:
            return got
        if n == 0:
            out = [SmallGraph.empty(0)]
        elif n == 1:
            out = [SmallGraph.empty(1)]
        else:
            parents = self.classes(n - 1)
            seen: dict[bytes, SmallGraph] = {}
            for parent in parents:
                base = list(parent.rows) + [0]
                for nbrs in range(1 << (n - 1)):
                    rows = base.copy()
                    rows[n - 1] = nbrs
                    for v in range(n - 1):
                        if nbrs >> v & 1:
                            rows[v] |= 1 << (n - 1)
                    g = SmallGraph(n, rows)
                    if self.hereditary is not None and not self.hereditary(g):
                        continue
                    key, order = canonical_form(g)
                    if key.data not in seen:
                        seen[key.data] = _as_canonical(g, order)
            out = [seen[k] for k in sorted(seen)]
        self._by_size[n] = out
        return out


def _as_canonical(g: SmallGraph, order: Sequence[int]) -> SmallGraph:
    return g.subgraph(list(order))


def enumerate_layer_graphs(
    n_max: int,
    predicate: Callable[[SmallGraph], bool] | None = None,
    hereditary: bool = False,
) -> list[SmallGraph]:
    """One representative per isomorphism class with 1 <= n <= n_max.

    ``predicate`` filters the result; with ``hereditary=True`` it is also used
    to prune during generation (only valid for vertex-deletion-closed
    properties).  Output is deterministic: ascending order, then canonical
    key bytes.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    enum = GraphEnumerator(hereditary=predicate if hereditary else None)
    out: list[SmallGraph] = []
    for n in range(1, n_max + 1):
        classes = enum.classes(n)
        if predicate is not None and not hereditary:
            classes = [g for g in classes if predicate(g)]
        out.extend(classes)
    return out
