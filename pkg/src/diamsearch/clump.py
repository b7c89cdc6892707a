"""Colour-count matrices for 3-colourable layered graphs.

A chi x l matrix with entries a[c][j] stands for the layered graph whose
layer j holds a[c][j] vertices of colour c, with an edge between two vertices
exactly when they sit in the same or adjacent layers and carry different
colours ("clump graphs").  All structure is determined by the counts, so a
vertex of colour c in layer j has degree

    deg(c, j) = (S[j-1] - a[c][j-1]) + (S[j] - a[c][j]) + (S[j+1] - a[c][j+1])

with S[j] the column sum; out-of-range columns count 0 in repeatable mode and
wrap around in cyclic block mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .layered import LayeredGraph

MODE_BLOCK = "block"
MODE_REPEATABLE = "repeatable"

ClumpColumn = tuple  # counts per colour


@dataclass(frozen=True)
class ColorPermutation:
    """Bijection on colours, optionally tagged with the period it realises."""

    perm: tuple
    period: int | None = None

    def apply(self, column: Sequence[int]) -> tuple:
        out = [0] * len(self.perm)
        for c, x in enumerate(column):
            out[self.perm[c]] = x
        return tuple(out)

    def order(self) -> int:
        k = 1
        cur = self.perm
        ident = tuple(range(len(self.perm)))
        while cur != ident:
            cur = tuple(self.perm[c] for c in cur)
            k += 1
        return k


class ClumpMatrix:
    """chi x l colour-count matrix, cyclic ("block") or path ("repeatable")."""

    __slots__ = ("chi", "columns", "mode")

    def __init__(self, chi: int, columns: Sequence[Sequence[int]], mode: str = MODE_BLOCK):
        if mode not in (MODE_BLOCK, MODE_REPEATABLE):
            raise ValueError(f"unknown mode {mode!r}")
        if chi < 1:
            raise ValueError("chi must be >= 1")
        cols = []
        for j, col in enumerate(columns):
            col = tuple(int(x) for x in col)
            if len(col) != chi:
                raise ValueError(f"column {j} has {len(col)} entries, expected {chi}")
            if any(x < 0 for x in col):
                raise ValueError(f"column {j} has a negative count")
            if not any(col):
                raise ValueError(f"column {j} is all zeros (layers are non-empty)")
            cols.append(col)
        if not cols:
            raise ValueError("matrix needs at least one column")
        self.chi = chi
        self.columns = tuple(cols)
        self.mode = mode

    @property
    def ncols(self) -> int:
        return len(self.columns)

    def column_sum(self, j: int) -> int:
        return sum(self.columns[j])

    def column_sums(self) -> list[int]:
        return [sum(col) for col in self.columns]

    def total(self) -> int:
        return sum(self.column_sums())

    def colours_present(self, j: int) -> int:
        return sum(1 for x in self.columns[j] if x)

    def _window(self, j: int) -> tuple[tuple | None, tuple, tuple | None]:
        cols = self.columns
        l = len(cols)
        if self.mode == MODE_BLOCK:
            return cols[(j - 1) % l], cols[j], cols[(j + 1) % l]
        prev = cols[j - 1] if j > 0 else None
        nxt = cols[j + 1] if j < l - 1 else None
        return prev, cols[j], nxt

    def serialize(self) -> str:
        lines = [f"chi={self.chi} columns={self.ncols} mode={self.mode}"]
        for c in range(self.chi):
            lines.append(" ".join(str(self.columns[j][c]) for j in range(self.ncols)))
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClumpMatrix)
            and self.chi == other.chi
            and self.columns == other.columns
            and self.mode == other.mode
        )

    def __hash__(self) -> int:
        return hash((self.chi, self.columns, self.mode))

    def __repr__(self) -> str:
        return f"ClumpMatrix(chi={self.chi}, mode={self.mode}, columns={list(self.columns)})"


def parse_matrix(text: str) -> ClumpMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    header = dict(part.split("=", 1) for part in lines[0].split())
    try:
        chi = int(header["chi"])
        ncols = int(header["columns"])
        mode = header["mode"]
    except KeyError as exc:
        raise ValueError(f"matrix header missing field {exc}") from exc
    if len(lines) != 1 + chi:
        raise ValueError(f"expected {chi} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        row = [int(tok) for tok in ln.split()]
        if len(row) != ncols:
            raise ValueError(f"row has {len(row)} entries, expected {ncols}")
        rows.append(row)
    columns = [tuple(rows[c][j] for c in range(chi)) for j in range(ncols)]
    return ClumpMatrix(chi, columns, mode)


def interior_degree(m: ClumpMatrix, j: int, c: int) -> int:
    """Degree of a colour-c vertex in layer j of the expanded graph."""
    prev, cur, nxt = m._window(j)
    if cur[c] == 0:
        raise ValueError(f"empty class: colour {c} absent from column {j}")
    deg = sum(cur) - cur[c]
    if prev is not None:
        deg += sum(prev) - prev[c]
    if nxt is not None:
        deg += sum(nxt) - nxt[c]
    return deg


def _backward_supported(prev: Sequence[int], cur: Sequence[int]) -> bool:
    sp = sum(prev)
    return all(not x or sp - prev[c] >= 1 for c, x in enumerate(cur))


def block_violations(m: ClumpMatrix, delta: int) -> list[tuple[str, int, int, int]]:
    """Degree and layering defects as (kind, column, colour, value) tuples.

    Boundary columns of a repeatable-mode matrix are exempt from the degree
    rule; in cyclic mode every column is interior.
    """
    out = []
    l = m.ncols
    interior = range(l) if m.mode == MODE_BLOCK else range(1, l - 1)
    for j in interior:
        for c in range(m.chi):
            if m.columns[j][c]:
                d = interior_degree(m, j, c)
                if d < delta:
                    out.append(("degree", j, c, d))
    backward = range(l) if m.mode == MODE_BLOCK else range(1, l)
    for j in backward:
        prev = m.columns[(j - 1) % l]
        cur = m.columns[j]
        for c in range(m.chi):
            if cur[c] and sum(prev) - prev[c] < 1:
                out.append(("no-backward-neighbour", j, c, 0))
    return out


def is_feasible_block(m: ClumpMatrix, delta: int) -> bool:
    return not block_violations(m, delta)


def block_ratio(m: ClumpMatrix) -> Fraction:
    """Layers per vertex of a feasible cyclic block: columns / total count."""
    if m.mode != MODE_BLOCK:
        raise ValueError("block_ratio needs a cyclic-block matrix")
    return Fraction(m.ncols, m.total())


def checked_block_ratio(m: ClumpMatrix, delta: int) -> Fraction:
    if not is_feasible_block(m, delta):
        raise ValueError(f"block infeasible for delta={delta}: {block_violations(m, delta)[:3]}")
    return block_ratio(m)


def expand_to_graph(m: ClumpMatrix, repetitions: int = 1) -> LayeredGraph:
    """Explicit layered graph with one layer per column (block repeated).

    The result is a path of layers (no wrap-around edges); the first and last
    layers are the boundary.  Colours are returned via vertex order: each
    layer lists its colour classes in row order.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if repetitions > 1 and m.mode != MODE_BLOCK:
        raise ValueError("only cyclic blocks can be repeated")
    columns = list(m.columns) * repetitions
    layers: list[list[int]] = []
    colour_of: list[int] = []
    vid = 0
    for col in columns:
        layer = []
        for c in range(m.chi):
            for _ in range(col[c]):
                layer.append(vid)
                colour_of.append(c)
                vid += 1
        layers.append(layer)
    n = vid
    rows = [0] * n
    for j in range(len(columns)):
        here = layers[j]
        for v in here:
            for u in here:
                if u != v and colour_of[u] != colour_of[v]:
                    rows[v] |= 1 << u
        if j + 1 < len(columns):
            for v in here:
                for u in layers[j + 1]:
                    if colour_of[u] != colour_of[v]:
                        rows[v] |= 1 << u
                        rows[u] |= 1 << v
    lg = LayeredGraph(n, rows, layers)
    return lg


def expansion_colours(m: ClumpMatrix, repetitions: int = 1) -> list[int]:
    """Colour of each vertex of expand_to_graph, in vertex order."""
    out = []
    for col in list(m.columns) * repetitions:
        for c in range(m.chi):
            out.extend([c] * col[c])
    return out


def repeatable_permutation(m: ClumpMatrix) -> ColorPermutation | None:
    """Seam colour permutation of a periodic presentation.

    Finds the smallest shift p >= 1 and the lexicographically smallest colour
    permutation pi with column[j+p] = pi(column[j]) for every overlapping j.
    For a minimal presentation (l = p + 2) this is exactly the map taking the
    first two columns onto the last two.
    """
    if m.ncols < 3:
        raise ValueError("need at least 3 columns")
    cols = m.columns
    l = m.ncols
    for p in range(1, l):
        for perm in sorted(permutations(range(m.chi))):
            cp = ColorPermutation(perm, p)
            if all(cols[j + p] == cp.apply(cols[j]) for j in range(l - p)):
                return cp
    return None


def unroll_block(columns: Sequence[tuple], perm: ColorPermutation, chi: int) -> ClumpMatrix:
    """Identity-wrap cyclic block equivalent to a pi-twisted periodic sequence.

    A period that repeats under colour permutation pi closes up after ord(pi)
    periods; the concatenation of pi^t images is a plain cyclic block with the
    same layers-per-vertex ratio.
    """
    out = []
    cur = list(columns)
    for _ in range(perm.order()):
        out.extend(tuple(col) for col in cur)
        cur = [perm.apply(col) for col in cur]
    return ClumpMatrix(chi, out, MODE_BLOCK)


def canonical_cyclic_form(m: ClumpMatrix) -> tuple:
    """Lexicographically least column sequence over rotations x colour perms.

    Canonical identity for a cyclic block; used as a deterministic tie-break
    and for comparing witnesses found by different search orders.
    """
    if m.mode != MODE_BLOCK:
        raise ValueError("cyclic form needs a block matrix")
    best = None
    cols = list(m.columns)
    l = len(cols)
    for perm in permutations(range(m.chi)):
        cp = ColorPermutation(perm)
        mapped = [cp.apply(c) for c in cols]
        for r in range(l):
            cand = tuple(mapped[(r + j) % l] for j in range(l))
            if best is None or cand < best:
                best = cand
    return best
