"""Canonical forms for vertex-labelled graphs.

Two labelled graphs get equal keys iff there is an isomorphism between them
that preserves the per-vertex integer labels.  The algorithm is classic
individualisation-refinement: refine an ordered partition seeded by labels
until equitable, then branch on the first non-singleton cell and keep the
lexicographically smallest certificate over all branches.  Exact (no hashing
shortcuts); exponential only on highly symmetric inputs, which at n <= 32 is
not a concern.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .graphs import SmallGraph, bits


class CanonicalKey:
    """Opaque canonical encoding; equality means labelled isomorphism."""

    __slots__ = ("data",)

    def __init__(self, data: bytes):
        self.data = data

    def __eq__(self, other) -> bool:
        return isinstance(other, CanonicalKey) and self.data == other.data

    def __lt__(self, other: "CanonicalKey") -> bool:
        return self.data < other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __repr__(self) -> str:
        return f"CanonicalKey({self.data.hex()})"


def _refine(rows: Sequence[int], cells: list[int]) -> list[int]:
    """Equitable refinement.

    ``cells`` maps vertex -> cell id; ids are compact and ordered (the order
    is part of the partition, so refinement is deterministic).  Returns the
    stable cell assignment.
    """
    n = len(rows)
    while True:
        ncells = max(cells) + 1
        masks = [0] * ncells
        for v in range(n):
            masks[cells[v]] |= 1 << v
        sigs = []
        for v in range(n):
            row = rows[v]
            sigs.append((cells[v], tuple((row & m).bit_count() for m in masks)))
        ranking = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if new == cells:
            return new
        cells = new


def _certificate(rows: Sequence[int], labels: Sequence[int]) -> tuple[bytes, tuple[int, ...]]:
    """Smallest certificate over all branchings, plus the order achieving it."""
    n = len(rows)
    label_rank = {l: i for i, l in enumerate(sorted(set(labels)))}
    start = _refine(rows, [label_rank[l] for l in labels])

    best: list[bytes | None] = [None]
    best_order: list[tuple[int, ...]] = [()]

    def encode(order: tuple[int, ...]) -> bytes:
        pos = {v: i for i, v in enumerate(order)}
        out = bytearray([n])
        for v in order:
            m = 0
            for u in bits(rows[v]):
                m |= 1 << pos[u]
            out += m.to_bytes(4, "little")
        for v in order:
            out += int(labels[v]).to_bytes(4, "little", signed=True)
        return bytes(out)

    def descend(cells: list[int]) -> None:
        ncells = max(cells) + 1 if cells else 0
        if ncells == n:
            order = tuple(sorted(range(n), key=lambda v: cells[v]))
            cert = encode(order)
            if best[0] is None or cert < best[0]:
                best[0] = cert
                best_order[0] = order
            return
        # first non-singleton cell, in cell order
        counts = [0] * ncells
        for c in cells:
            counts[c] += 1
        target = next(c for c in range(ncells) if counts[c] > 1)
        members = [v for v in range(n) if cells[v] == target]
        for v in members:
            child = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(cells)]
            # compact ids, preserving order
            ranking = {c: i for i, c in enumerate(sorted(set(child)))}
            child = [ranking[c] for c in child]
            descend(_refine(rows, child))

    if n == 0:
        return b"\x00", ()
    descend(start)
    assert best[0] is not None
    return best[0], best_order[0]


@lru_cache(maxsize=1 << 18)
def _canon_cached(rows: tuple[int, ...], labels: tuple[int, ...]) -> tuple[bytes, tuple[int, ...]]:
    return _certificate(rows, labels)


def canonical_form(g: SmallGraph, labels: Sequence[int] | None = None) -> tuple[CanonicalKey, tuple[int, ...]]:
    """Canonical key plus a vertex order realising it.

    The returned ``order`` lists original vertices in canonical position, so
    ``g.subgraph(order)`` is the canonical representative.
    """
    if labels is None:
        labels = (0,) * g.n
    if len(labels) != g.n:
        raise ValueError("labels length must equal order")
    cert, order = _canon_cached(g.rows, tuple(int(l) for l in labels))
    return CanonicalKey(cert), order


def canonical_key(g: SmallGraph, labels: Sequence[int] | None = None) -> CanonicalKey:
    return canonical_form(g, labels)[0]


def two_layer_graph(g_a: SmallGraph, g_b: SmallGraph, cross: int) -> SmallGraph:
    """Disjoint union of g_a and g_b plus cross edges.

    ``cross`` packs the bipartite adjacency as bit a*nb + b for a in g_a and
    b in g_b (g_b vertices are shifted by g_a.n in the result).
    """
    na, nb = g_a.n, g_b.n
    rows = list(g_a.rows) + [row << na for row in g_b.rows]
    for a in range(na):
        for b in range(nb):
            if cross >> (a * nb + b) & 1:
                rows[a] |= 1 << (na + b)
                rows[na + b] |= 1 << a
    return SmallGraph(na + nb, rows)


def two_layer_key(g_a: SmallGraph, g_b: SmallGraph, cross: int) -> CanonicalKey:
    """Canonical key of a two-layer graph with layer indices as labels."""
    joint = two_layer_graph(g_a, g_b, cross)
    return canonical_key(joint, [0] * g_a.n + [1] * g_b.n)


def layered_isomorphic(
    pair1: tuple[SmallGraph, SmallGraph, int],
    pair2: tuple[SmallGraph, SmallGraph, int],
) -> bool:
    """Isomorphism of two-layer graphs mapping first layers to first layers.

    Each pair is (layer_a, layer_b, cross_mask) as in :func:`two_layer_graph`.
    """
    return two_layer_key(*pair1) == two_layer_key(*pair2)


def are_isomorphic(g1: SmallGraph, g2: SmallGraph,
                   labels1: Sequence[int] | None = None,
                   labels2: Sequence[int] | None = None) -> bool:
    if g1.n != g2.n:
        return False
    return canonical_key(g1, labels1) == canonical_key(g2, labels2)
