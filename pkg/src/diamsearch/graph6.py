"""graph6 text codec.

Standard 6-bit encoding: N(n) followed by the upper triangle of the
adjacency matrix in column order (x_{0,1}, x_{0,2}, x_{1,2}, x_{0,3}, ...),
packed big-endian into 6-bit groups, each group +63.  Works for any order
the format supports; adjacency may be given as SmallGraph or raw rows.
"""

from __future__ import annotations

from typing import Sequence

from .graphs import SmallGraph


def _encode_n(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative order")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return b"~" + bytes([(n >> 12 & 63) + 63, (n >> 6 & 63) + 63, (n & 63) + 63])
    if n <= 68719476735:
        return b"~~" + bytes([(n >> 6 * i & 63) + 63 for i in range(5, -1, -1)])
    raise ValueError("order too large for graph6")


def _decode_n(data: bytes) -> tuple[int, int]:
    """Returns (n, bytes consumed)."""
    if not data:
        raise ValueError("empty graph6 string")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] != 126:
        if len(data) < 4:
            raise ValueError("truncated graph6 order")
        n = 0
        for b in data[1:4]:
            n = n << 6 | (b - 63)
        return n, 4
    if len(data) < 8:
        raise ValueError("truncated graph6 order")
    n = 0
    for b in data[2:8]:
        n = n << 6 | (b - 63)
    return n, 8


def encode_graph6(rows: Sequence[int], n: int | None = None) -> str:
    """Encode adjacency rows (int bitmasks) as a graph6 line."""
    if n is None:
        n = len(rows)
    out = bytearray(_encode_n(n))
    group = 0
    nbits = 0
    for j in range(1, n):
        col = rows[j]
        for i in range(j):
            group = group << 1 | (col >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(group + 63)
                group, nbits = 0, 0
    if nbits:
        out.append((group << (6 - nbits)) + 63)
    return out.decode("ascii")


def decode_graph6(text: str) -> tuple[int, list[int]]:
    """Decode a graph6 line to (n, adjacency rows)."""
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    data = s.encode("ascii")
    n, used = _decode_n(data)
    rows = [0] * n
    need = n * (n - 1) // 2
    bits_avail = (len(data) - used) * 6
    if bits_avail < need:
        raise ValueError("graph6 string too short")
    idx = 0
    pos = used
    group = 0
    nbits = 0
    for j in range(1, n):
        for i in range(j):
            if nbits == 0:
                group = data[pos] - 63
                if not 0 <= group < 64:
                    raise ValueError("invalid graph6 byte")
                pos += 1
                nbits = 6
            bit = group >> (nbits - 1) & 1
            nbits -= 1
            if bit:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            idx += 1
    return n, rows


def graph_to_g6(g: SmallGraph) -> str:
    return encode_graph6(g.rows, g.n)


def g6_to_graph(text: str) -> SmallGraph:
    n, rows = decode_graph6(text)
    if n > 32:
        raise ValueError("graph too large for SmallGraph; use decode_graph6")
    return SmallGraph(n, rows)
