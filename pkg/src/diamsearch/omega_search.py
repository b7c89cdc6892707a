"""Best layers-per-vertex ratio over K4-free layer structures.

Unlike the 3-colourable variant, edges are not determined by counts: each
layer carries an explicit K4-free graph and consecutive layers are joined by
a *maximal* K4-free cross-edge set (adding any further cross edge would
create a K4; more edges never hurt, so maximal sets suffice).  A sequence of
layers is repeatable when the first two and last two layers induce
isomorphic graphs respecting the layer split, every interior vertex has
degree at least delta, and the whole graph is K4-free; the target is the
maximum (layers-2)/(interior order) over repeatable sequences.

The dynamic programme keys each prefix by its canonical start interface, the
canonical form of its last layer annotated with current degrees, and its
length; only the cheapest prefix per key survives.  Branch-and-bound gating,
incumbent seeding (short structures, a layer-size ladder, and an optional
witness imported from the colour-count search) and commutative frontier
merges mirror the colour search and give worker-count independence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .canonical import CanonicalKey, canonical_form, canonical_key, two_layer_graph, two_layer_key
from .clump import ClumpMatrix
from .enumeration import GraphEnumerator
from .graphs import SmallGraph, bits, is_k4_free, rows_have_k4
from .layered import LayeredGraph

_INF = 1 << 40
_NEG = -(1 << 60)


@dataclass
class AssumptionProfile:
    """Structural normalisations proven for specific minimum degrees."""

    normalize_size4: bool = False      # size-4 layers are C4, neighbours edgeless, cross complete
    normalize_size5: bool = False      # size-5 layers are K{2,3} or C5, same neighbour rule
    cap_layer_size_5: bool = False     # no layer larger than 5
    restrict_adjacent_44: bool = False # adjacent size-4 layers from a fixed pattern list

    def validate(self, delta: int) -> None:
        if self.normalize_size4 and delta != 5:
            raise ValueError("size-4 normalisation is only justified for delta=5")
        if (self.normalize_size5 or self.cap_layer_size_5 or self.restrict_adjacent_44) and delta != 6:
            raise ValueError("size-5/cap-5/adjacent-4-4 rules are only justified for delta=6")

    def any(self) -> bool:
        return (self.normalize_size4 or self.normalize_size5
                or self.cap_layer_size_5 or self.restrict_adjacent_44)

    def names(self) -> list[str]:
        out = []
        if self.normalize_size4:
            out.append("normalize-size4")
        if self.normalize_size5:
            out.append("normalize-size5")
        if self.cap_layer_size_5:
            out.append("cap-layer-size-5")
        if self.restrict_adjacent_44:
            out.append("restrict-adjacent-44")
        return out


def profile_by_name(name: str) -> AssumptionProfile:
    if name in ("", "none"):
        return AssumptionProfile()
    if name == "delta5":
        return AssumptionProfile(normalize_size4=True)
    if name == "delta6":
        return AssumptionProfile(normalize_size5=True, cap_layer_size_5=True,
                                 restrict_adjacent_44=True)
    raise ValueError(f"unknown profile {name!r}")


@dataclass
class OmegaSearchConfig:
    delta: int
    max_period: int
    max_layer_size: int | None = None
    profile: AssumptionProfile = field(default_factory=AssumptionProfile)

    def __post_init__(self):
        if self.delta < 4:
            raise ValueError("delta must be >= 4")
        if self.max_period < 2:
            raise ValueError("max_period must be >= 2")
        if self.max_layer_size is None:
            self.max_layer_size = 2 * self.delta
        if not 1 <= self.max_layer_size <= 2 * self.delta:
            raise ValueError("max_layer_size must be within 1..2*delta")
        self.profile.validate(self.delta)
        if self.profile.cap_layer_size_5:
            self.max_layer_size = min(self.max_layer_size, 5)

    def with_layer_cap(self, cap: int) -> "OmegaSearchConfig":
        return OmegaSearchConfig(
            delta=self.delta,
            max_period=self.max_period,
            max_layer_size=min(cap, self.max_layer_size),
            profile=self.profile,
        )


@dataclass
class OmegaSearchResult:
    best_ratio: Fraction | None
    witness: LayeredGraph | None
    states_expanded: int
    config: OmegaSearchConfig
    period: int | None = None


# -- maximal K4-free cross-edge sets ---------------------------------------


def _cross_patterns(ga: SmallGraph, gb: SmallGraph) -> list[int]:
    """Minimal forbidden cross-edge sets (slot masks) whose full presence
    completes a K4 in the joint graph.  Slot a*nb + b = edge (a, b)."""
    na, nb = ga.n, gb.n
    patterns = []
    a_edges = ga.edges()
    b_edges = gb.edges()
    # 2+2: an edge on each side plus all four cross edges
    for a1, a2 in a_edges:
        for b1, b2 in b_edges:
            patterns.append(
                1 << (a1 * nb + b1) | 1 << (a1 * nb + b2)
                | 1 << (a2 * nb + b1) | 1 << (a2 * nb + b2)
            )
    # 3+1: a triangle on one side fully joined to one far vertex
    for tri in _triangles(ga):
        for b in range(nb):
            patterns.append(sum(1 << (a * nb + b) for a in tri))
    for tri in _triangles(gb):
        for a in range(na):
            patterns.append(sum(1 << (a * nb + b) for b in tri))
    return patterns


def _triangles(g: SmallGraph) -> list[tuple[int, int, int]]:
    out = []
    for u in range(g.n):
        for v in bits(g.rows[u] >> (u + 1) << (u + 1)):
            common = g.rows[u] & g.rows[v]
            for w in bits(common >> (v + 1) << (v + 1)):
                out.append((u, v, w))
    return out


def enumerate_maximal_cross_masks(ga: SmallGraph, gb: SmallGraph) -> list[int]:
    """All maximal K4-free cross-edge sets as slot masks, ascending.

    Backtracking over slots with two sound prunes: a slot is included only if
    it completes no forbidden pattern, and an excluded slot must keep at
    least one pattern fully includable as its justification, else no
    extension is maximal.
    """
    if not is_k4_free(ga) or not is_k4_free(gb):
        return []  # the joint contains a K4 before any cross edge
    na, nb = ga.n, gb.n
    nslots = na * nb
    patterns = _cross_patterns(ga, gb)
    per_slot: list[list[int]] = [[] for _ in range(nslots)]
    for pat in patterns:
        m = pat
        while m:
            s = (m & -m).bit_length() - 1
            per_slot[s].append(pat)
            m &= m - 1
    out: list[int] = []

    def descend(slot: int, inc: int, exc: int) -> None:
        if slot == nslots:
            for x_mask in _mask_bits(exc):
                if not any(pat & ~inc == 1 << x_mask for pat in per_slot[x_mask]):
                    return
            out.append(inc)
            return
        bit = 1 << slot
        # include: no pattern may become fully present
        trial = inc | bit
        if not any(pat & ~trial == 0 for pat in per_slot[slot]):
            descend(slot + 1, trial, exc)
        # exclude: the slot needs a justification pattern whose other edges
        # are still includable, and every earlier exclusion must keep one too
        new_exc = exc | bit
        if any(pat & new_exc == bit for pat in per_slot[slot]):
            alive = True
            for x in _mask_bits(exc):
                if not any(pat & new_exc == 1 << x for pat in per_slot[x]):
                    alive = False
                    break
            if alive:
                descend(slot + 1, inc, new_exc)

    descend(0, 0, 0)
    return out


def _mask_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_edge_sets(g_prev: SmallGraph, g_next: SmallGraph) -> list[list[tuple[int, int]]]:
    """All maximal K4-free cross-edge sets between two layer graphs.

    Only the two layers' internal edges matter: a clique never spans
    non-adjacent layers, so K4 detection is local to the joint graph.
    """
    nb = g_next.n
    out = []
    for mask in enumerate_maximal_cross_masks(g_prev, g_next):
        out.append(sorted(divmod(s, nb) for s in _mask_bits(mask)))
    return out


# -- repeatability ----------------------------------------------------------


def layer_pair_data(lg: LayeredGraph, i: int) -> tuple[SmallGraph, SmallGraph, int]:
    """(graph of N_i, graph of N_{i+1}, cross mask) in layer vertex order."""
    va, vb = lg.layers[i], lg.layers[i + 1]
    whole = lg.rows
    ga = SmallGraph(len(va), [_project(whole[v], va) for v in va])
    gb = SmallGraph(len(vb), [_project(whole[v], vb) for v in vb])
    cross = 0
    for ia, v in enumerate(va):
        for ib, u in enumerate(vb):
            if whole[v] >> u & 1:
                cross |= 1 << (ia * len(vb) + ib)
    return ga, gb, cross


def _project(row: int, verts: Sequence[int]) -> int:
    out = 0
    for i, v in enumerate(verts):
        if row >> v & 1:
            out |= 1 << i
    return out


def verify_repeatable(lg: LayeredGraph, delta: int) -> bool:
    """Interior degrees >= delta, K4-free, and matching end interfaces."""
    if lg.depth < 2:
        return False
    lg.check_layering()
    if rows_have_k4(lg.rows):
        return False
    boundary = set(lg.layers[0]) | set(lg.layers[-1])
    for v in range(lg.n):
        if v not in boundary and lg.rows[v].bit_count() < delta:
            return False
    first = layer_pair_data(lg, 0)
    last = layer_pair_data(lg, lg.depth - 1)
    return two_layer_key(*first) == two_layer_key(*last)


# -- layer pools and profile-aware transition generation ---------------------


def _named_graphs() -> dict[str, SmallGraph]:
    return {
        "C4": SmallGraph.cycle(4),
        "4K1": SmallGraph.empty(4),
        "S4": SmallGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)]),
        "K23": SmallGraph.complete_bipartite(2, 3),
        "C5": SmallGraph.cycle(5),
    }


class _LayerPool:
    """Lazy per-size K4-free canonical layer graphs, profile-filtered."""

    def __init__(self, cfg: OmegaSearchConfig):
        self.cfg = cfg
        self._enum = GraphEnumerator(hereditary=is_k4_free)
        self._by_size: dict[int, list[SmallGraph]] = {}
        named = _named_graphs()
        self._keys = {name: canonical_key(g).data for name, g in named.items()}

    def is_named(self, g: SmallGraph, name: str) -> bool:
        return canonical_key(g).data == self._keys[name]

    def classes(self, size: int) -> list[SmallGraph]:
        got = self._by_size.get(size)
        if got is not None:
            return got
        cfg = self.cfg
        classes = self._enum.classes(size)
        if cfg.profile.normalize_size4 and size == 4:
            classes = [g for g in classes if self.is_named(g, "C4")]
        if cfg.profile.normalize_size5 and size == 5:
            classes = [g for g in classes
                       if self.is_named(g, "K23") or self.is_named(g, "C5")]
        self._by_size[size] = classes
        return classes


def _cross_degrees(mask: int, na: int, nb: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    da = [0] * na
    db = [0] * nb
    m = mask
    while m:
        s = (m & -m).bit_length() - 1
        a, b = divmod(s, nb)
        da[a] += 1
        db[b] += 1
        m &= m - 1
    return tuple(da), tuple(db)


_FULL_CROSS_SENTINEL = -1


class _TransitionSource:
    """Enumerates (cross mask, degree vectors) choices for a layer pair.

    Results are memoised per (concrete previous rows, target class); profile
    rules replace the generic maximal enumeration for normalised sizes.
    """

    def __init__(self, cfg: OmegaSearchConfig, pool: _LayerPool):
        self.cfg = cfg
        self.pool = pool
        self._memo: dict[tuple, list[tuple[int, tuple, tuple]]] = {}

    def choices(self, ga: SmallGraph, gb: SmallGraph, gb_id: tuple) -> list[tuple[int, tuple, tuple]]:
        key = (ga.rows, gb_id)
        got = self._memo.get(key)
        if got is not None:
            return got
        out = self._compute(ga, gb)
        self._memo[key] = out
        return out

    def _compute(self, ga: SmallGraph, gb: SmallGraph) -> list[tuple[int, tuple, tuple]]:
        cfg = self.cfg
        pool = self.pool
        na, nb = ga.n, gb.n
        prof = cfg.profile
        full = (1 << (na * nb)) - 1

        def complete_only() -> list[tuple[int, tuple, tuple]]:
            return [(full, (nb,) * na, (na,) * nb)]

        a_edgeless = all(r == 0 for r in ga.rows)
        b_edgeless = all(r == 0 for r in gb.rows)
        if prof.normalize_size4:
            if nb == 4:
                # target must be C4 (pool guarantees), neighbours edgeless
                if not a_edgeless:
                    return []
                return complete_only()
            if na == 4:
                if not b_edgeless:
                    return []
                return complete_only()
        if prof.normalize_size5:
            if nb == 5:
                if not a_edgeless:
                    return []
                return complete_only()
            if na == 5:
                if not b_edgeless:
                    return []
                return complete_only()
        if prof.restrict_adjacent_44 and na == 4 and nb == 4:
            return self._adjacent_44(ga, gb)
        out = []
        for mask in enumerate_maximal_cross_masks(ga, gb):
            da, db = _cross_degrees(mask, na, nb)
            if any(x == 0 for x in db):
                continue  # new layer vertex without a neighbour one layer back
            out.append((mask, da, db))
        return out

    def _adjacent_44(self, ga: SmallGraph, gb: SmallGraph) -> list[tuple[int, tuple, tuple]]:
        pool = self.pool
        full = (1 << 16) - 1
        a_is = {n: pool.is_named(ga, n) for n in ("S4", "4K1", "C4")}
        b_is = {n: pool.is_named(gb, n) for n in ("S4", "4K1", "C4")}
        out = []
        if a_is["S4"] and b_is["S4"]:
            ca = max(range(4), key=lambda v: ga.rows[v].bit_count())
            cb = max(range(4), key=lambda v: gb.rows[v].bit_count())
            mask = full & ~(1 << (ca * 4 + cb))
            out.append((mask, *_cross_degrees(mask, 4, 4)))
        elif (a_is["4K1"] and b_is["4K1"]) or (a_is["4K1"] and b_is["C4"]) \
                or (a_is["C4"] and b_is["4K1"]):
            out.append((full, (4, 4, 4, 4), (4, 4, 4, 4)))
        return out


# -- admissible completion bounds -------------------------------------------


def _size_minfut(cfg: OmegaSearchConfig, max_r: int) -> np.ndarray:
    """fut[s, r]: least total of r more layer sizes appended after a layer of
    size s, under the window theorems (3 consecutive interior layers hold at
    least delta+1 vertices, 4 consecutive at least delta+3)."""
    smax = cfg.max_layer_size
    delta = cfg.delta
    sizes = range(1, smax + 1)
    # nodes: (x, y, z) = last three sizes; seeded with wildcard (x, y)
    from itertools import product

    nodes = list(product(sizes, sizes, sizes))
    idx = {n: i for i, n in enumerate(nodes)}
    trans: list[list[tuple[int, int]]] = [[] for _ in nodes]
    for (x, y, z) in nodes:
        lst = trans[idx[(x, y, z)]]
        for d in sizes:
            if y + z + d < delta + 1:
                continue
            if x + y + z + d < delta + 3:
                continue
            lst.append((idx[(y, z, d)], d))
    table = np.full((len(nodes), max_r + 1), _INF, dtype=np.int64)
    table[:, 0] = 0
    for r in range(1, max_r + 1):
        prev = table[:, r - 1]
        for i, lst in enumerate(trans):
            best = _INF
            for j, w in lst:
                v = w + prev[j]
                if v < best:
                    best = v
            table[i, r] = best
    fut = np.full((smax + 1, max_r + 1), _INF, dtype=np.int64)
    for (x, y, z), i in idx.items():
        s = z
        np.minimum(fut[s], table[i], out=fut[s])
    return fut


class _OmegaIncumbent:
    """Best candidate (-ratio, period, certificate bytes, witness)."""

    def __init__(self):
        self.best: tuple | None = None
        self.me: dict[tuple[int, int], np.ndarray] = {}  # (s_last, s01) -> [k] bound
        self._me_key: tuple | None = None

    def ratio(self) -> Fraction | None:
        return -self.best[0] if self.best else None

    def rn_rd(self) -> tuple[int, int] | None:
        if self.best is None:
            return None
        r = -self.best[0]
        return r.numerator, r.denominator

    def offer(self, cand: tuple) -> bool:
        if self.best is not None and not cand[:3] < self.best[:3]:
            return False
        gates_changed = self.best is None or cand[:2] != self.best[:2]
        self.best = cand
        return gates_changed

    def ensure_gates(self, cfg: OmegaSearchConfig, fut: np.ndarray, pairs: Iterable[tuple[int, int]]) -> None:
        if self.best is None:
            return
        rn, rd = self.rn_rd()
        best_period = self.best[1]
        L = cfg.max_period + 2
        key = (rn, rd, best_period, cfg.max_layer_size, L)
        if self._me_key != key:
            self.me.clear()
            self._me_key = key
        for s_last, s01 in pairs:
            if (s_last, s01) in self.me:
                continue
            me = np.full(L + 2, _NEG, dtype=np.int64)
            row = fut[s_last]
            for k in range(2, L):
                best = _NEG
                for r in range(max(1, 4 - k), L - k + 1):
                    relb = row[r]
                    if r >= 2:
                        relb = max(relb, row[r - 2] + s01)
                    relb = min(relb, _INF)
                    val = (k + r - 2) * rd - relb * rn
                    if k + r - 2 > best_period:
                        val -= 1
                    if val > best:
                        best = val
                me[k] = best
            self.me[(s_last, s01)] = me


# -- the search engine -------------------------------------------------------


@dataclass(frozen=True)
class OmegaSearchState:
    """Documented shape of a dynamic-programming key (engine uses interned ints)."""

    start_interface: CanonicalKey
    last_layer: CanonicalKey
    layer_count: int


class _Forms:
    """Interned canonical (layer graph, degree vector) pairs."""

    def __init__(self):
        self.by_key: dict[bytes, int] = {}
        self.graph: list[SmallGraph] = []
        self.degvec: list[tuple[int, ...]] = []

    def intern(self, g: SmallGraph, degvec: Sequence[int]) -> tuple[int, list[int]]:
        """(form id, position map original index -> form index)."""
        key, order = canonical_form(g, degvec)
        fid = self.by_key.get(key.data)
        pos = [0] * g.n
        for i, v in enumerate(order):
            pos[v] = i
        if fid is None:
            fid = len(self.graph)
            self.by_key[key.data] = fid
            self.graph.append(g.subgraph(list(order)))
            self.degvec.append(tuple(degvec[v] for v in order))
        return fid, pos


class _SearchContext:
    """Profile-shared pools and caches reused across ladder rungs."""

    def __init__(self, cfg: OmegaSearchConfig):
        self.base_cfg = cfg
        self.pool = _LayerPool(cfg)
        self.trans = _TransitionSource(cfg, self.pool)
        self.forms = _Forms()
        self.joint_keys: dict[tuple, bytes] = {}

    def joint_key(self, ga: SmallGraph, gb: SmallGraph, gb_id: tuple, mask: int) -> bytes:
        key = (ga.rows, gb_id, mask)
        got = self.joint_keys.get(key)
        if got is None:
            got = two_layer_key(ga, gb, mask).data
            self.joint_keys[key] = got
        return got


_OENGINE: "OmegaEngine | None" = None


def _omega_expand_chunk(args):
    items, k, rn = args
    eng = _OENGINE
    ctx = eng.ctx
    cfg = eng.cfg
    forms = ctx.forms
    pool = ctx.pool
    trans = ctx.trans
    me = eng.incumbent.me
    shift = eng.form_shift
    delta = cfg.delta
    nxt: dict[int, int] = {}
    records: list[tuple] = []
    detect_gen = k + 1 >= 4
    for key, order in items:
        sp, fid = key >> shift, key & ((1 << shift) - 1)
        s0, s1, startkey = eng.start_meta[sp]
        s01 = s0 + s1
        ga = forms.graph[fid]
        degvec = forms.degvec[fid]
        need = tuple(max(0, delta - d) for d in degvec)
        excess = order - s01
        for m in range(1, cfg.max_layer_size + 1):
            gate = me.get((m, s01)) if rn is not None else None
            gate_val = None
            if gate is not None:
                gate_val = int(gate[k + 1])
                if (excess + m) * rn > gate_val:
                    # even the cheapest completion through size m cannot win
                    if not (detect_gen and ga.n == s0 and m == s1):
                        continue
            detect_here = detect_gen and ga.n == s0 and m == s1
            for hidx, gb in enumerate(pool.classes(m)):
                for mask, da, db in trans.choices(ga, gb, (m, hidx)):
                    if any(x < n for x, n in zip(da, need)):
                        continue
                    if detect_here and ctx.joint_key(ga, gb, (m, hidx), mask) == startkey:
                        records.append((sp, k + 1, fid, m, hidx, mask, order + m))
                    if gate_val is not None and (excess + m) * rn > gate_val:
                        continue
                    internal = [gb.rows[v].bit_count() for v in range(m)]
                    newdeg = [internal[v] + db[v] for v in range(m)]
                    nfid, _pos = forms.intern(gb, newdeg)
                    newkey = sp << shift | nfid
                    old = nxt.get(newkey)
                    if old is None or order + m < old:
                        nxt[newkey] = order + m
    return nxt, records


class OmegaEngine:
    def __init__(self, cfg: OmegaSearchConfig, ctx: _SearchContext,
                 incumbent: _OmegaIncumbent, workers: int = 1):
        self.cfg = cfg
        self.ctx = ctx
        self.incumbent = incumbent
        self.workers = workers
        self.form_shift = 22  # form ids comfortably below 4M
        self.fut = _size_minfut(cfg, cfg.max_period + 2)
        self._build_starts()
        self.states_expanded = 0
        self._executor = None
        self._retained: list[tuple[np.ndarray, np.ndarray] | None] = []

    # -- starts -----------------------------------------------------------

    def _build_starts(self):
        cfg = self.cfg
        ctx = self.ctx
        self.start_meta: list[tuple[int, int, bytes]] = []
        self.start_build: list[tuple] = []  # (g1, g2, mask, form id of layer 1)
        self.start_states: dict[int, int] = {}
        seen: dict[bytes, int] = {}
        cap = cfg.max_layer_size
        self._gate_pairs = {(m, s01) for m in range(1, cap + 1)
                            for s01 in range(2, 2 * cap + 1)}
        self.incumbent.ensure_gates(cfg, self.fut, self._gate_pairs)
        rn_rd = self.incumbent.rn_rd()
        me = self.incumbent.me
        for s0 in range(1, cap + 1):
            for s1 in range(1, cap + 1):
                if rn_rd is not None:
                    gate = me.get((s1, s0 + s1))
                    if gate is not None and 0 > gate[2]:
                        continue  # no completion from this size pair can win
                for g1 in ctx.pool.classes(s0):
                    for hidx, g2 in enumerate(ctx.pool.classes(s1)):
                        for mask, da, db in ctx.trans.choices(g1, g2, (s1, hidx)):
                            jk = ctx.joint_key(g1, g2, (s1, hidx), mask)
                            if jk in seen:
                                continue
                            seen[jk] = len(self.start_meta)
                            internal = [g2.rows[v].bit_count() for v in range(s1)]
                            newdeg = [internal[v] + db[v] for v in range(s1)]
                            fid, _pos = ctx.forms.intern(g2, newdeg)
                            sp = len(self.start_meta)
                            self.start_meta.append((s0, s1, jk))
                            self.start_build.append((g1, g2, mask, fid))
                            self.start_states[sp << self.form_shift | fid] = s0 + s1

    def _initial_states(self) -> dict[int, int]:
        rn_rd = self.incumbent.rn_rd()
        if rn_rd is None:
            return dict(self.start_states)
        rn = rn_rd[0]
        me = self.incumbent.me
        out = {}
        for key, order in self.start_states.items():
            sp = key >> self.form_shift
            s0, s1, _jk = self.start_meta[sp]
            gate = me.get((s1, s0 + s1))
            if gate is not None and 0 > gate[2]:
                continue
            out[key] = order
        return out

    # -- executor ----------------------------------------------------------

    def _get_executor(self):
        if self.workers <= 1:
            return None
        if self._executor is None:
            from concurrent.futures import ProcessPoolExecutor

            global _OENGINE
            _OENGINE = self
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self._executor

    def _drop_executor(self):
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def close(self):
        self._drop_executor()

    # -- retention and reconstruction ---------------------------------------

    def _retain(self, k: int, states: dict[int, int]) -> None:
        while len(self._retained) <= k:
            self._retained.append(None)
        keys = np.fromiter(states.keys(), dtype=np.int64, count=len(states))
        orders = np.fromiter(states.values(), dtype=np.int64, count=len(states))
        idx = np.argsort(keys)
        self._retained[k] = (keys[idx], orders[idx])

    def _retained_sp_items(self, k: int, sp: int) -> list[tuple[int, int]]:
        got = self._retained[k]
        if got is None:
            return []
        keys, orders = got
        lo = int(np.searchsorted(keys, sp << self.form_shift))
        hi = int(np.searchsorted(keys, (sp + 1) << self.form_shift))
        return [(int(keys[i]) & ((1 << self.form_shift) - 1), int(orders[i]))
                for i in range(lo, hi)]

    def _find_step(self, sp: int, k: int, target_fid: int, target_order: int):
        """Predecessor (fid, hsize, hidx, mask) producing target at gen k+1."""
        ctx = self.ctx
        cfg = self.cfg
        delta = cfg.delta
        tsize = ctx.forms.graph[target_fid].n
        for fid, order in self._retained_sp_items(k, sp):
            if order != target_order - tsize:
                continue
            ga = ctx.forms.graph[fid]
            degvec = ctx.forms.degvec[fid]
            need = tuple(max(0, delta - d) for d in degvec)
            for hidx, gb in enumerate(ctx.pool.classes(tsize)):
                for mask, da, db in ctx.trans.choices(ga, gb, (tsize, hidx)):
                    if any(x < n for x, n in zip(da, need)):
                        continue
                    internal = [gb.rows[v].bit_count() for v in range(tsize)]
                    newdeg = [internal[v] + db[v] for v in range(tsize)]
                    nfid, _pos = ctx.forms.intern(gb, newdeg)
                    if nfid == target_fid:
                        return fid, tsize, hidx, mask
        return None

    def _materialise(self, records: list[tuple]) -> bool:
        improved = False
        pre = []
        for sp, gen, fid, m, hidx, mask, order in records:
            s0, s1, _jk = self.start_meta[sp]
            ratio = Fraction(gen - 2, order - s0 - s1)
            pre.append((-ratio, gen - 2, sp, gen, fid, m, hidx, mask, order))
        pre.sort()
        best = self.incumbent.best
        for neg, period, sp, gen, fid, m, hidx, mask, order in pre:
            if best is not None and (neg, period) > (best[0], best[1]):
                continue
            witness = self._rebuild_witness(sp, gen, fid, m, hidx, mask, order)
            if witness is None:
                continue
            cert = canonical_witness_cert(witness)
            cand = (neg, period, cert, witness)
            if self.incumbent.offer(cand):
                improved = True
            best = self.incumbent.best
        return improved

    def _rebuild_witness(self, sp: int, gen: int, fid: int, m: int, hidx: int,
                         mask: int, order: int) -> LayeredGraph | None:
        """Replay the recorded prefix into an explicit layered graph."""
        steps: list[tuple[int, int, int]] = [(m, hidx, mask)]  # (size, class, cross)
        cur_fid = fid
        cur_order = order - m
        for k in range(gen - 1, 2, -1):
            found = self._find_step(sp, k - 1, cur_fid, cur_order)
            if found is None:
                return None
            pfid, hsize, phidx, pmask = found
            steps.append((hsize, phidx, pmask))
            cur_fid = pfid
            cur_order -= hsize
        g1, g2, mask0, fid2 = self.start_build[sp]
        if cur_fid != fid2 or cur_order != g1.n + g2.n:
            return None
        steps.reverse()
        return replay_layers(self.ctx, g1, g2, mask0, steps)

    # -- main loop -----------------------------------------------------------

    def run_pass(self, period_bound: int) -> None:
        global _OENGINE
        _OENGINE = self
        self.incumbent.ensure_gates(self.cfg, self.fut, self._gate_pairs)
        current = self._initial_states()
        self._retained = []
        self._retain(2, current)
        max_layers = period_bound + 2
        for k in range(2, max_layers):
            if not current:
                break
            items = list(current.items())
            self.states_expanded += len(items)
            rn_rd = self.incumbent.rn_rd()
            rn = rn_rd[0] if rn_rd else None
            chunks = self._chunks(items)
            args = [(chunk, k, rn) for chunk in chunks]
            executor = self._get_executor() if len(chunks) > 1 else None
            if executor is not None:
                results = list(executor.map(_omega_expand_chunk, args))
            else:
                results = [_omega_expand_chunk(a) for a in args]
            nxt: dict[int, int] = {}
            records: list[tuple] = []
            for frag, recs in results:
                if not nxt:
                    nxt = frag
                else:
                    get = nxt.get
                    for kk, vv in frag.items():
                        old = get(kk)
                        if old is None or vv < old:
                            nxt[kk] = vv
                records.extend(recs)
            self._retain(k + 1, nxt)
            if records and self._materialise(records):
                self._drop_executor()
                self.incumbent.ensure_gates(self.cfg, self.fut, self._gate_pairs)
                rn = self.incumbent.rn_rd()[0]
                me = self.incumbent.me
                kept: dict[int, int] = {}
                for key, order in nxt.items():
                    sp = key >> self.form_shift
                    fid = key & ((1 << self.form_shift) - 1)
                    s0, s1, _jk = self.start_meta[sp]
                    gate = me.get((self.ctx.forms.graph[fid].n, s0 + s1))
                    if gate is None or (order - s0 - s1) * rn <= gate[k + 1]:
                        kept[key] = order
                nxt = kept
                self._retain(k + 1, nxt)
            current = nxt

    def _chunks(self, items: list) -> list[list]:
        if self.workers <= 1 or len(items) < 256:
            return [items]
        nchunks = self.workers * 4
        size = (len(items) + nchunks - 1) // nchunks
        return [items[i:i + size] for i in range(0, len(items), size)]


def replay_layers(ctx: _SearchContext, g1: SmallGraph, g2: SmallGraph, mask0: int,
                  steps: list[tuple[int, int, int]]) -> LayeredGraph:
    """Assemble the explicit layered graph from a transition trace.

    Each appended layer is stored in the vertex order of its canonical
    annotated form, so that the next step's cross mask indexes line up.
    """
    rows: list[int] = []
    layers: list[list[int]] = []

    def add_layer(g: SmallGraph) -> list[int]:
        base = len(rows)
        ids = [base + i for i in range(g.n)]
        rows.extend([0] * g.n)
        for v in range(g.n):
            for u in bits(g.rows[v]):
                rows[ids[v]] |= 1 << ids[u]
        layers.append(ids)
        return ids

    def add_cross(a_ids: list[int], b_ids: list[int], mask: int):
        nb = len(b_ids)
        m = mask
        while m:
            s = (m & -m).bit_length() - 1
            a, b = divmod(s, nb)
            rows[a_ids[a]] |= 1 << b_ids[b]
            rows[b_ids[b]] |= 1 << a_ids[a]
            m &= m - 1

    ids1 = add_layer(g1)
    ids2 = add_layer(g2)
    add_cross(ids1, ids2, mask0)
    internal = [g2.rows[v].bit_count() for v in range(g2.n)]
    _da, db = _cross_degrees(mask0, g1.n, g2.n)
    prev_graph = g2
    prev_deg = [internal[v] + db[v] for v in range(g2.n)]
    prev_ids = ids2
    for hsize, hidx, mask in steps:
        _fid, pos = ctx.forms.intern(prev_graph, prev_deg)
        # reorder previous layer ids into the form order the mask indexes
        ordered_prev = [0] * len(prev_ids)
        for orig, p in enumerate(pos):
            ordered_prev[p] = prev_ids[orig]
        gb = ctx.pool.classes(hsize)[hidx]
        ids_b = add_layer(gb)
        m = mask
        while m:
            s = (m & -m).bit_length() - 1
            a, b = divmod(s, hsize)
            rows[ordered_prev[a]] |= 1 << ids_b[b]
            rows[ids_b[b]] |= 1 << ordered_prev[a]
            m &= m - 1
        internal = [gb.rows[v].bit_count() for v in range(hsize)]
        _da, db = _cross_degrees(mask, len(prev_ids), hsize)
        prev_graph = gb
        prev_deg = [internal[v] + db[v] for v in range(hsize)]
        prev_ids = ids_b
    return LayeredGraph(len(rows), rows, layers)


def canonical_witness_cert(lg: LayeredGraph) -> bytes:
    if lg.n <= 32:
        labels = [0] * lg.n
        for i, layer in enumerate(lg.layers):
            for v in layer:
                labels[v] = i
        return canonical_key(lg.small_graph(), labels).data
    # large witnesses: layer-size profile plus sorted edge list is stable
    enc = [bytes([len(l) % 256]) for l in lg.layers]
    return b"".join(enc) + repr(sorted((min(u, v), max(u, v))
                                       for u in range(lg.n)
                                       for v in bits(lg.rows[u]))).encode()


# -- seeding from the colour-count search ------------------------------------


def _mask_from_pair(ga: SmallGraph, gb: SmallGraph, cross_full: bool = True) -> int:
    return (1 << (ga.n * gb.n)) - 1


def conforms_to_profile(lg: LayeredGraph, profile: AssumptionProfile, pool: _LayerPool) -> bool:
    """Whether an explicit layered graph uses only profile-normalised shapes."""
    pairs = [layer_pair_data(lg, i) for i in range(lg.depth)]
    graphs = [pairs[0][0]] + [p[1] for p in pairs]
    full = lambda ga, gb: (1 << (ga.n * gb.n)) - 1
    for i, g in enumerate(graphs):
        if profile.normalize_size4 and g.n == 4:
            if not pool.is_named(g, "C4"):
                return False
            for j in (i - 1, i + 1):
                if 0 <= j < len(graphs):
                    if graphs[j].edge_count() != 0:
                        return False
            if i > 0 and pairs[i - 1][2] != full(*pairs[i - 1][:2]):
                return False
            if i < len(pairs) and pairs[i][2] != full(*pairs[i][:2]):
                return False
        if profile.normalize_size5 and g.n == 5:
            if not (pool.is_named(g, "K23") or pool.is_named(g, "C5")):
                return False
            for j in (i - 1, i + 1):
                if 0 <= j < len(graphs):
                    if graphs[j].edge_count() != 0:
                        return False
            if i > 0 and pairs[i - 1][2] != full(*pairs[i - 1][:2]):
                return False
            if i < len(pairs) and pairs[i][2] != full(*pairs[i][:2]):
                return False
        if profile.cap_layer_size_5 and g.n > 5:
            return False
    if profile.restrict_adjacent_44:
        for i in range(lg.depth):
            ga, gb, cross = pairs[i]
            if ga.n == 4 and gb.n == 4:
                names = lambda g: [n for n in ("S4", "4K1", "C4") if pool.is_named(g, n)]
                na, nb = names(ga), names(gb)
                if not na or not nb:
                    return False
                pair = {na[0], nb[0]}
                if pair == {"S4"}:
                    ca = max(range(4), key=lambda v: ga.rows[v].bit_count())
                    cb = max(range(4), key=lambda v: gb.rows[v].bit_count())
                    if cross != (full(ga, gb) & ~(1 << (ca * 4 + cb))):
                        return False
                elif pair in ({"4K1"}, {"4K1", "C4"}):
                    if cross != full(ga, gb):
                        return False
                else:
                    return False
    return True


def cross_sets_maximal(lg: LayeredGraph) -> bool:
    """Every consecutive-layer cross set admits no K4-free edge addition."""
    for i in range(lg.depth):
        ga, gb, cross = layer_pair_data(lg, i)
        patterns = _cross_patterns(ga, gb)
        for slot in range(ga.n * gb.n):
            if cross >> slot & 1:
                continue
            if not any(pat >> slot & 1 and not pat & ~(1 << slot) & ~cross
                       for pat in patterns):
                return False
    return True


def seed_candidate_from_block(cfg: OmegaSearchConfig, ctx: _SearchContext,
                              block: ClumpMatrix, ratio: Fraction) -> tuple | None:
    """Import a cyclic colour-count block as an explicit repeatable witness.

    Only accepted when the expansion lies inside this search space: layer
    sizes within the cap, period within the bound, all cross sets maximal,
    and the profile's normalised shapes respected.
    """
    from .clump import expand_to_graph

    period = block.ncols
    if period > cfg.max_period:
        return None
    if any(sum(col) > cfg.max_layer_size for col in block.columns):
        return None
    cols = list(block.columns) + list(block.columns[:2])
    lg = expand_to_graph(ClumpMatrix(block.chi, cols, "repeatable"))
    if not verify_repeatable(lg, cfg.delta):
        return None
    if not cross_sets_maximal(lg):
        return None
    if cfg.profile.any() and not conforms_to_profile(lg, cfg.profile, ctx.pool):
        return None
    interior = lg.interior_order()
    got = Fraction(lg.depth - 1, interior)
    if got != ratio:
        return None
    return (-ratio, period, canonical_witness_cert(lg), lg)


def search(cfg: OmegaSearchConfig, workers: int = 1,
           seed_blocks: Sequence[tuple[ClumpMatrix, Fraction]] | None = None,
           use_chi_seed: bool = True) -> OmegaSearchResult:
    """Maximum repeatable ratio over explicit K4-free layer structures.

    The incumbent is seeded from the colour-count search when its witness is
    a member of this search space, then refined through a ladder of layer
    size caps with iteratively deepened period bounds; the final rung at full
    caps certifies the optimum.  Deterministic for any worker count.
    """
    ctx = _SearchContext(cfg)
    incumbent = _OmegaIncumbent()
    expanded = 0
    if seed_blocks is None and use_chi_seed:
        from .chi_search import ChiSearchConfig
        from .chi_search import search as chi_search_run

        chi_cfg = ChiSearchConfig(
            delta=cfg.delta,
            max_period=cfg.max_period,
            max_column_sum=min(cfg.max_layer_size, 3 * cfg.delta // 2),
        )
        chi_res = chi_search_run(chi_cfg, workers=1)
        seed_blocks = []
        if chi_res.witness is not None:
            seed_blocks.append((chi_res.witness, chi_res.best_ratio))
    for block, ratio in seed_blocks or []:
        cand = seed_candidate_from_block(cfg, ctx, block, ratio)
        if cand is not None:
            incumbent.offer(cand)
    for cap in range(2, cfg.max_layer_size + 1):
        sub = cfg.with_layer_cap(cap)
        engine = OmegaEngine(sub, ctx, incumbent, workers)
        try:
            for bound in _period_deepening(cfg.max_period):
                engine.run_pass(bound)
        finally:
            engine.close()
        expanded += engine.states_expanded
    best = incumbent.best
    if best is None:
        return OmegaSearchResult(None, None, expanded, cfg)
    neg_ratio, period, _cert, witness = best
    assert verify_repeatable(witness, cfg.delta)
    ratio = -neg_ratio
    assert Fraction(witness.depth - 1, witness.interior_order()) == ratio
    return OmegaSearchResult(ratio, witness, expanded, cfg, period)


def _period_deepening(max_period: int) -> list[int]:
    out = []
    c = 4
    while c < max_period:
        out.append(c)
        c *= 2
    out.append(max_period)
    return out
