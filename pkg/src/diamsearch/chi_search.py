"""Best layers-per-vertex ratio over 3-colourable layer structures.

The search walks colour-count columns left to right.  A sequence of columns
A_0..A_d is *repeatable* when some colour permutation maps (A_0, A_1) onto
(A_{d-1}, A_d) and every interior column meets the minimum-degree rule; its
value is (d-1) / (interior vertex count) and the goal is the maximum value
over all repeatable sequences with repetition length d-1 at most the period
bound.

States collapse to (canonical start pair, previous column, last column,
length): two prefixes agreeing on those extend identically, so a per-length
table keeps only the cheapest prefix.  Pruning is branch-and-bound against
the incumbent ratio with an admissible completion bound (min-plus shortest
paths over the legal column-pair graph): a state dies only when it provably
cannot even tie the incumbent.  The incumbent is built up cheaply first (a
direct scan of one- and two-column cycles, then a ladder of growing column
caps, each with iteratively deepened period bounds), after which the full
space survives only near optimal density.  The final pass is exhaustive up
to the configured caps, so the result is the exact optimum.  All frontier
merges are commutative minima, making results and counters independent of
chunking and worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .clump import (
    ClumpMatrix,
    ColorPermutation,
    canonical_cyclic_form,
    checked_block_ratio,
    is_feasible_block,
    unroll_block,
)

_INF = 1 << 40
_NEG = -(1 << 60)
_EAGER_LIMIT = 320  # column count above which full cubes are not materialised


@dataclass
class ChiSearchConfig:
    delta: int
    max_period: int
    max_column_sum: int | None = None
    max_class_size: int | None = None
    assume_missing_color: bool = False
    require_singleton_layer: bool = False
    chi: int = 3

    def __post_init__(self):
        if self.delta < 4:
            raise ValueError("delta must be >= 4")
        if self.max_period < 3:
            raise ValueError("max_period must be >= 3")
        if self.chi < 2:
            raise ValueError("chi must be >= 2")
        if self.max_column_sum is None:
            self.max_column_sum = 3 * self.delta // 2
        if self.max_class_size is None:
            self.max_class_size = self.max_column_sum
        if self.max_column_sum < 1 or self.max_class_size < 1:
            raise ValueError("caps must be >= 1")

    def conditional_flags(self) -> list[str]:
        flags = []
        if self.assume_missing_color:
            flags.append("assume-missing-color")
        if self.require_singleton_layer:
            flags.append("require-singleton-layer")
        return flags

    def with_cap(self, cap: int) -> "ChiSearchConfig":
        return ChiSearchConfig(
            delta=self.delta,
            max_period=self.max_period,
            max_column_sum=min(cap, self.max_column_sum),
            max_class_size=min(self.max_class_size, min(cap, self.max_column_sum)),
            assume_missing_color=self.assume_missing_color,
            require_singleton_layer=self.require_singleton_layer,
            chi=self.chi,
        )


@dataclass(frozen=True)
class ChiSearchState:
    start_pair: tuple
    prev_column: tuple
    last_column: tuple
    layer_count: int


@dataclass
class ChiSearchResult:
    best_ratio: Fraction | None
    witness: ClumpMatrix | None
    states_expanded: int
    config: ChiSearchConfig
    period: int | None = None


def generate_columns(cfg: ChiSearchConfig) -> list[tuple]:
    """All legal columns under the caps and flags, deterministic order."""
    out = []

    def rec(prefix: list[int], total: int):
        if len(prefix) == cfg.chi:
            if total > 0:
                out.append(tuple(prefix))
            return
        for x in range(min(cfg.max_class_size, cfg.max_column_sum - total) + 1):
            prefix.append(x)
            rec(prefix, total + x)
            prefix.pop()

    rec([], 0)
    cols = [c for c in out if not (cfg.assume_missing_color and sum(1 for x in c if x) > cfg.chi - 1)]
    cols.sort(key=lambda c: (sum(c), c))
    return cols


def _column_ok(col: Sequence[int], cfg: ChiSearchConfig) -> bool:
    if len(col) != cfg.chi or any(x < 0 for x in col) or not any(col):
        return False
    if sum(col) > cfg.max_column_sum or max(col) > cfg.max_class_size:
        return False
    if cfg.assume_missing_color and sum(1 for x in col if x) > cfg.chi - 1:
        return False
    return True


def _backward_ok(last: Sequence[int], nxt: Sequence[int]) -> bool:
    sl = sum(last)
    return all(not x or sl - last[c] >= 1 for c, x in enumerate(nxt))


def _degree_ok(prev, last, nxt, delta: int) -> bool:
    sp, sl, sn = sum(prev), sum(last), sum(nxt)
    for c, x in enumerate(last):
        if x and (sp - prev[c]) + (sl - x) + (sn - nxt[c]) < delta:
            return False
    return True


def extend_column(state: ChiSearchState, nxt: Sequence[int], cfg: ChiSearchConfig) -> ChiSearchState | None:
    """Successor state, or None when the append is illegal.

    Appending fixes the three-column window of the current last column, so
    that column's occupied classes must reach the minimum degree now; the new
    column must also keep the layer decomposition valid, i.e. each of its
    colour classes needs a differently coloured vertex in the layer before.
    """
    nxt = tuple(int(x) for x in nxt)
    if not _column_ok(nxt, cfg):
        return None
    if not _backward_ok(state.last_column, nxt):
        return None
    if not _degree_ok(state.prev_column, state.last_column, nxt, cfg.delta):
        return None
    return ChiSearchState(state.start_pair, state.last_column, nxt, state.layer_count + 1)


def detect_repeatable(state: ChiSearchState) -> ColorPermutation | None:
    """Colour permutation mapping the start pair onto the last two columns."""
    if state.layer_count < 4:
        return None
    a0, a1 = state.start_pair
    chi = len(a0)
    for perm in sorted(permutations(range(chi))):
        cp = ColorPermutation(perm)
        if cp.apply(a0) == state.prev_column and cp.apply(a1) == state.last_column:
            return cp
    return None


class _Tables:
    """Interned columns, legality adjacency, and completion lower bounds.

    Eager mode materialises the full pair adjacency and a pair-level min-plus
    table; above _EAGER_LIMIT columns only a column-sum-level relaxation is
    kept (coarser bound, same admissibility) and adjacency rows are built on
    demand.
    """

    def __init__(self, cfg: ChiSearchConfig):
        self.cfg = cfg
        self.cols = generate_columns(cfg)
        self.ncols = len(self.cols)
        if self.ncols == 0:
            raise ValueError("no legal columns under the given caps")
        self.col_id = {c: i for i, c in enumerate(self.cols)}
        arr = np.array(self.cols, dtype=np.int64)
        self.arr = arr
        self.sums = arr.sum(axis=1)
        self.sums_list = self.sums.tolist()
        self.npairs = self.ncols * self.ncols
        self.perms = sorted(permutations(range(cfg.chi)))
        occ = arr > 0
        self.occ = occ
        self.slack = self.sums[:, None] - arr
        self.bfs_ok = np.all(~occ[None, :, :] | (self.slack[:, None, :] >= 1), axis=2)
        self.window_floor = math.ceil(3 * cfg.delta / 2)
        self.full_colour = occ.sum(axis=1) == cfg.chi
        self.singleton = (occ.sum(axis=1) == 1).tolist()
        self.eager = self.ncols <= _EAGER_LIMIT
        if self.eager:
            self._build_adjacency_eager()
        else:
            self.adj = {}
        self._minfut: np.ndarray | None = None
        self._minfut_group: np.ndarray | None = None

    def _legal_row(self, p: int, l: int) -> np.ndarray:
        thr = self.cfg.delta - self.slack[p] - self.slack[l]
        ok = np.all((self.slack >= thr[None, :]) | ~self.occ[l][None, :], axis=1)
        ok &= self.bfs_ok[l]
        if self.full_colour[l]:
            ok &= self.sums[p] + self.sums[l] + self.sums >= self.window_floor
        return np.nonzero(ok)[0]

    def _build_adjacency_eager(self):
        N = self.ncols
        adj: list = [None] * (N * N)
        arrays: list = [None] * (N * N)
        lengths = np.zeros(N * N, dtype=np.int64)
        for p in range(N):
            thr = self.cfg.delta - self.slack[p][None, :] - self.slack  # [l, c]
            ok_ln = np.all((self.slack[None, :, :] >= thr[:, None, :]) | ~self.occ[:, None, :], axis=2)
            ok_ln &= self.bfs_ok
            if self.full_colour.any():
                wsum = self.sums[p] + self.sums[:, None] + self.sums[None, :]
                ok_ln &= ~self.full_colour[:, None] | (wsum >= self.window_floor)
            for l in range(N):
                ids = np.nonzero(ok_ln[l])[0]
                arrays[p * N + l] = ids
                adj[p * N + l] = ids.tolist()
                lengths[p * N + l] = len(ids)
        self.adj = adj
        self.edge_offsets = np.zeros(N * N + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.edge_offsets[1:])
        total = int(self.edge_offsets[-1])
        self.edge_dst_pair = np.empty(total, dtype=np.int64)
        self.edge_w = np.empty(total, dtype=np.int64)
        for pid in range(N * N):
            a, b = int(self.edge_offsets[pid]), int(self.edge_offsets[pid + 1])
            if a == b:
                continue
            ids = arrays[pid]
            l = pid % N
            self.edge_dst_pair[a:b] = l * N + ids
            self.edge_w[a:b] = self.sums[ids]

    def next_ids(self, pair: int) -> list[int]:
        if self.eager:
            return self.adj[pair]
        got = self.adj.get(pair)
        if got is None:
            p, l = divmod(pair, self.ncols)
            got = self._legal_row(p, l).tolist()
            self.adj[pair] = got
        return got

    def legal_edge(self, p: int, l: int, n: int) -> bool:
        cols = self.cols
        if not _backward_ok(cols[l], cols[n]):
            return False
        if not _degree_ok(cols[p], cols[l], cols[n], self.cfg.delta):
            return False
        if self.full_colour[l]:
            if self.sums_list[p] + self.sums_list[l] + self.sums_list[n] < self.window_floor:
                return False
        return True

    # -- admissible completion bounds -------------------------------------

    def minfut(self, max_r: int) -> tuple[np.ndarray, np.ndarray | None]:
        """(table, group): table[g, r] lower-bounds the total size of r more
        legally appended columns from any pair in group g (g = pair id in
        eager mode, (S_prev, S_last) class otherwise)."""
        if self._minfut is not None and self._minfut.shape[1] > max_r:
            return self._minfut, self._minfut_group
        if self.eager:
            self._minfut = self._minfut_exact(max_r)
            self._minfut_group = None
        else:
            self._minfut, self._minfut_group = self._minfut_sums(max_r)
        return self._minfut, self._minfut_group

    def _minfut_exact(self, max_r: int) -> np.ndarray:
        N2 = self.npairs
        table = np.full((N2, max_r + 1), _INF, dtype=np.int64)
        table[:, 0] = 0
        nonempty = self.edge_offsets[:-1] < self.edge_offsets[1:]
        starts = self.edge_offsets[:-1][nonempty]
        for r in range(1, max_r + 1):
            vals = self.edge_w + table[self.edge_dst_pair, r - 1]
            np.clip(vals, None, _INF, out=vals)
            col = np.full(N2, _INF, dtype=np.int64)
            if len(starts):
                col[nonempty] = np.minimum.reduceat(vals, starts)
            table[:, r] = col
        return table

    def _minfut_sums(self, max_r: int) -> tuple[np.ndarray, np.ndarray]:
        smax = self.cfg.max_column_sum
        delta = self.cfg.delta
        nodes = smax * smax
        table = np.full((nodes, max_r + 1), _INF, dtype=np.int64)
        table[:, 0] = 0
        s = np.arange(1, smax + 1, dtype=np.int64)
        triple_ok = (s[:, None, None] + s[None, :, None] + s[None, None, :]) >= delta + 1
        for r in range(1, max_r + 1):
            prev = table[:, r - 1].reshape(smax, smax)
            cand = np.where(triple_ok, s[None, None, :] + prev[None, :, :], _INF)
            table[:, r] = cand.min(axis=2).reshape(-1)
        group = (self.sums[:, None] - 1) * smax + (self.sums[None, :] - 1)
        return table, group.reshape(-1).astype(np.int64)

    def pair_group(self, pair: int) -> int:
        if self._minfut_group is None:
            return pair
        return int(self._minfut_group[pair])


class _Incumbent:
    """Best candidate so far plus the branch-and-bound gate tables.

    Candidates compare as (-ratio, period, canonical columns); merging keeps
    the minimum, a commutative operation.  The gate keeps a state alive iff
    (order - s01) * rn <= me[s01][group(pair), k]: exact "cannot even tie"
    pruning.
    """

    def __init__(self):
        self.best: tuple | None = None  # (-ratio, period, canon cols tuple)
        self.me: dict[int, np.ndarray] = {}
        self._me_key: tuple | None = None

    def ratio(self) -> Fraction | None:
        return -self.best[0] if self.best else None

    def rn_rd(self) -> tuple[int, int] | None:
        if self.best is None:
            return None
        r = -self.best[0]
        return r.numerator, r.denominator

    def offer(self, cand: tuple) -> bool:
        """Merge a candidate; True iff the gate-relevant part improved."""
        if self.best is not None and not cand < self.best:
            return False
        gates_changed = self.best is None or cand[:2] != self.best[:2]
        self.best = cand
        return gates_changed

    def ensure_gates(self, tables: _Tables, max_layers: int, s01_values) -> None:
        """Gate: a state survives iff it can complete to a candidate strictly
        better than the incumbent ratio, or tie it with period at most the
        incumbent's (longer-period ties lose the final tie-break)."""
        if self.best is None:
            return
        rn, rd = self.rn_rd()
        best_period = self.best[1]
        key = (rn, rd, best_period, id(tables), max_layers)
        if self._me_key != key:
            self.me.clear()
            self._me_key = key
        missing = [s for s in s01_values if s not in self.me]
        if not missing:
            return
        L = max_layers
        table, _group = tables.minfut(L)
        rows = table.shape[0]
        for s01 in missing:
            me = np.full((rows, L + 2), _NEG, dtype=np.int64)
            for k in range(2, L):
                best = None
                for r in range(max(1, 4 - k), L - k + 1):
                    relb = table[:, r].copy()
                    if r >= 2:
                        np.maximum(relb, table[:, r - 2] + s01, out=relb)
                    np.clip(relb, None, _INF, out=relb)
                    vals = (k + r - 2) * rd - relb * rn
                    if k + r - 2 > best_period:
                        vals -= 1  # tie at this period cannot win; require strict gain
                    best = vals if best is None else np.maximum(best, vals)
                if best is not None:
                    me[:, k] = best
            self.me[s01] = me


def _candidate_from_block(block_cols: Sequence[tuple], perm: tuple, ratio: Fraction,
                          cfg: ChiSearchConfig) -> tuple | None:
    unrolled = unroll_block(list(block_cols), ColorPermutation(perm), cfg.chi)
    if cfg.require_singleton_layer:
        if not any(sum(1 for x in col if x) == 1 for col in unrolled.columns):
            return None
    canon = canonical_cyclic_form(unrolled)
    return (-ratio, unrolled.ncols, canon)


def seed_short_cycles(cfg: ChiSearchConfig) -> tuple | None:
    """Best one- or two-column cyclic block, as an initial incumbent."""
    cols = generate_columns(cfg)
    arr = np.array(cols, dtype=np.int64)
    sums = arr.sum(axis=1)
    occ = arr > 0
    slack = sums[:, None] - arr  # S_x - a_{c,x}
    ident = tuple(range(cfg.chi))
    best: tuple | None = None
    # single repeating column: window (A, A, A), neighbours are A itself
    ok1 = np.all(~occ | (3 * slack >= cfg.delta), axis=1) & np.all(~occ | (slack >= 1), axis=1)
    for i in np.nonzero(ok1)[0].tolist():
        cand = _candidate_from_block([cols[i]], ident, Fraction(1, int(sums[i])), cfg)
        if cand is not None and (best is None or cand < best):
            best = cand
    # alternating pair (A, B): window of A is (B, A, B) and vice versa
    back = np.all(~occ[None, :, :] | (slack[:, None, :] >= 1), axis=2)  # [prev, col]
    deg_a = np.all(~occ[:, None, :] | (2 * slack[None, :, :] + slack[:, None, :] >= cfg.delta), axis=2)
    ok2 = back & back.T & deg_a & deg_a.T
    for i, j in zip(*np.nonzero(ok2)):
        if i > j:
            continue
        cand = _candidate_from_block(
            [cols[i], cols[j]], ident, Fraction(2, int(sums[i] + sums[j])), cfg
        )
        if cand is not None and (best is None or cand < best):
            best = cand
    return best


_ENGINE: "ChiEngine | None" = None


def _expand_chunk(args):
    """Expand a chunk of (key -> order) states one layer.

    Reads only forked-immutable engine tables plus per-call arguments; the
    returned fragments and candidate records merge commutatively.
    """
    items, k, rn = args
    eng = _ENGINE
    t = eng.tables
    N = t.ncols
    npairs = t.npairs
    sums = t.sums_list
    singleton = t.singleton
    shift = eng.key_shift
    track_bit = eng.track_singleton
    group = t._minfut_group
    me = eng.incumbent.me
    s01_of_sp = eng.s01_of_sp
    gate_cols: dict[int, list] = {}
    if rn is not None:
        for s01, table in me.items():
            gate_cols[s01] = table[:, k + 1].tolist()
    nxt_states: dict[int, int] = {}
    records: list[tuple] = []
    detect = k + 1 >= 4
    get = nxt_states.get
    for key, order in items:
        bit = key & 1 if track_bit else 0
        core = key >> 1 if track_bit else key
        sp, pair = divmod(core, npairs)
        s01 = s01_of_sp[sp]
        l = pair % N
        base = l * N
        tgt = eng.targets[sp]
        gate = gate_cols.get(s01)
        excess = order - s01
        newbit = bit or singleton[l]
        spnp = sp * npairs
        for n in t.next_ids(pair):
            new_pair = base + n
            new_order = order + sums[n]
            if detect and (not track_bit or newbit):
                perm = tgt.get(new_pair)
                if perm is not None:
                    records.append((sp, k + 1, new_pair, new_order, perm))
            if gate is not None:
                g = new_pair if group is None else group[new_pair]
                if (excess + sums[n]) * rn > gate[g]:
                    continue
            newkey = spnp + new_pair
            if track_bit:
                newkey = newkey << 1 | newbit
            old = get(newkey)
            if old is None or new_order < old:
                nxt_states[newkey] = new_order
    return nxt_states, records


class ChiEngine:
    """One search rung: full state-space walk at the given column caps."""

    def __init__(self, cfg: ChiSearchConfig, incumbent: _Incumbent, workers: int = 1):
        self.cfg = cfg
        self.workers = workers
        self.tables = _Tables(cfg)
        self.incumbent = incumbent
        self.track_singleton = cfg.require_singleton_layer
        self.key_shift = 1 if self.track_singleton else 0
        self._build_starts()
        self.states_expanded = 0
        self._executor = None
        self._retained: list[tuple[np.ndarray, np.ndarray] | None] = []

    def _build_starts(self):
        t = self.tables
        N = t.ncols
        starts: list[tuple[int, int]] = []
        for a in range(N):
            pa = t.cols[a]
            for b in np.nonzero(t.bfs_ok[a])[0].tolist():
                pb = t.cols[b]
                canon = min((ColorPermutation(p).apply(pa), ColorPermutation(p).apply(pb))
                            for p in t.perms)
                if (pa, pb) == canon:
                    starts.append((a, b))
        self.starts = starts
        self.s01_of_sp = [int(t.sums[a] + t.sums[b]) for a, b in starts]
        self.targets: list[dict[int, tuple]] = []
        for a, b in starts:
            pa, pb = t.cols[a], t.cols[b]
            tgt: dict[int, tuple] = {}
            for perm in t.perms:
                cp = ColorPermutation(perm)
                pid = t.col_id[cp.apply(pa)] * N + t.col_id[cp.apply(pb)]
                if pid not in tgt:
                    tgt[pid] = perm
            self.targets.append(tgt)

    def _initial_states(self) -> dict[int, int]:
        t = self.tables
        rn_rd = self.incumbent.rn_rd()
        me = self.incumbent.me
        out: dict[int, int] = {}
        for sp, (a, b) in enumerate(self.starts):
            pair = a * t.ncols + b
            s01 = self.s01_of_sp[sp]
            if rn_rd is not None:
                gate = me.get(s01)
                if gate is not None and 0 > gate[t.pair_group(pair), 2]:
                    continue
            key = sp * t.npairs + pair
            if self.track_singleton:
                key <<= 1
            out[key] = s01
        return out

    # -- executor lifecycle (recreated whenever gate tables change) --------

    def _get_executor(self):
        if self.workers <= 1:
            return None
        if self._executor is None:
            from concurrent.futures import ProcessPoolExecutor

            global _ENGINE
            _ENGINE = self
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self._executor

    def _drop_executor(self):
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def close(self):
        self._drop_executor()

    # -- candidate materialisation -----------------------------------------

    def _retain(self, k: int, states: dict[int, int]) -> None:
        while len(self._retained) <= k:
            self._retained.append(None)
        keys = np.fromiter(states.keys(), dtype=np.int64, count=len(states))
        orders = np.fromiter(states.values(), dtype=np.int64, count=len(states))
        idx = np.argsort(keys)
        self._retained[k] = (keys[idx], orders[idx])

    def _retained_order(self, k: int, key: int) -> int | None:
        got = self._retained[k]
        if got is None:
            return None
        keys, orders = got
        i = int(np.searchsorted(keys, key))
        if i < len(keys) and keys[i] == key:
            return int(orders[i])
        return None

    def _reconstruct(self, sp: int, gen: int, pair: int, order: int) -> list[int] | None:
        """Column-id sequence of a recorded candidate, by backward walk.

        Every retained entry is a genuine valid prefix, so greedily taking the
        first predecessor whose retained order and edge legality match always
        terminates at the start pair.  In singleton-tracking mode the walk
        keeps the "has a one-colour interior column" requirement satisfiable
        at every step.
        """
        t = self.tables
        N = t.ncols
        ids = [0] * gen
        ids[gen - 2], ids[gen - 1] = divmod(pair, N)
        o = order
        cur_a, cur_b = ids[gen - 2], ids[gen - 1]
        need_bit = 1 if self.track_singleton else 0
        for k in range(gen - 1, 1, -1):
            o_prev = o - t.sums_list[cur_b]
            if self.track_singleton and k == 2:
                need_bit = 0
            found = None
            for p in range(N):
                base_key = sp * t.npairs + p * N + cur_a
                if self.track_singleton:
                    bits = (need_bit,) if not t.singleton[cur_a] else ((1, 0) if need_bit else (0,))
                    hit = any(self._retained_order(k, base_key << 1 | b) == o_prev for b in bits)
                    if hit and t.legal_edge(p, cur_a, cur_b):
                        if t.singleton[cur_a] and need_bit:
                            if self._retained_order(k, base_key << 1 | 1) == o_prev:
                                next_bit = 1
                            else:
                                next_bit = 0
                        else:
                            next_bit = need_bit
                        found = p
                        need_bit = next_bit
                        break
                else:
                    if self._retained_order(k, base_key) == o_prev and t.legal_edge(p, cur_a, cur_b):
                        found = p
                        break
            if found is None:
                return None
            o = o_prev
            cur_a, cur_b = found, cur_a
            ids[k - 2] = found
        a0, b0 = self.starts[sp]
        if ids[0] != a0 or ids[1] != b0:
            return None
        return ids

    def _materialise(self, records: list[tuple]) -> bool:
        """Fold candidate records into the incumbent; True iff ratio improved."""
        t = self.tables
        improved = False
        pre: list[tuple] = []
        for sp, gen, pair, order, perm in records:
            ratio = Fraction(gen - 2, order - self.s01_of_sp[sp])
            up = gen - 2
            cur = tuple(perm)
            ident = tuple(range(self.cfg.chi))
            while cur != ident:
                cur = tuple(perm[c] for c in cur)
                up += gen - 2
            pre.append((-ratio, up, sp, gen, pair, order, perm))
        pre.sort()
        best = self.incumbent.best
        for neg, up, sp, gen, pair, order, perm in pre:
            if best is not None and (neg, up) > (best[0], best[1]):
                continue
            ids = self._reconstruct(sp, gen, pair, order)
            if ids is None:
                continue
            block = [t.cols[i] for i in ids[1:-1]]
            cand = _candidate_from_block(block, perm, -neg, self.cfg)
            if cand is None:
                continue
            if self.incumbent.offer(cand):
                improved = True
            best = self.incumbent.best
        return improved

    # -- main loop ----------------------------------------------------------

    def run_pass(self, period_bound: int) -> None:
        global _ENGINE
        _ENGINE = self
        t = self.tables
        max_layers = period_bound + 2
        self.incumbent.ensure_gates(t, max_layers_cap(self.cfg), set(self.s01_of_sp))
        current = self._initial_states()
        self._retained = []
        self._retain(2, current)
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
                results = list(executor.map(_expand_chunk, args))
            else:
                results = [_expand_chunk(a) for a in args]
            nxt: dict[int, int] = {}
            records: list[tuple] = []
            for frag, recs in results:
                if not nxt:
                    nxt = frag
                else:
                    get = nxt.get
                    for key, val in frag.items():
                        old = get(key)
                        if old is None or val < old:
                            nxt[key] = val
                records.extend(recs)
            self._retain(k + 1, nxt)
            if records and self._materialise(records):
                # gates are stale: rebuild, refilter the frontier, restart pool
                self._drop_executor()
                self.incumbent.ensure_gates(t, max_layers_cap(self.cfg), set(self.s01_of_sp))
                rn_rd = self.incumbent.rn_rd()
                rn = rn_rd[0]
                me = self.incumbent.me
                kept: dict[int, int] = {}
                for key, order in nxt.items():
                    core = key >> self.key_shift
                    sp, pair = divmod(core, t.npairs)
                    s01 = self.s01_of_sp[sp]
                    if (order - s01) * rn <= me[s01][t.pair_group(pair), k + 1]:
                        kept[key] = order
                nxt = kept
                self._retain(k + 1, nxt)
            current = nxt

    def _chunks(self, items: list) -> list[list]:
        if self.workers <= 1 or len(items) < 1024:
            return [items]
        nchunks = self.workers * 4
        size = (len(items) + nchunks - 1) // nchunks
        return [items[i:i + size] for i in range(0, len(items), size)]


def max_layers_cap(cfg: ChiSearchConfig) -> int:
    return cfg.max_period + 2


def _cap_ladder(cfg: ChiSearchConfig) -> list[int]:
    full = cfg.max_column_sum
    first = min(4, full)
    return list(range(first, full + 1))


def _period_schedule(max_period: int) -> list[int]:
    out = []
    c = 4
    while c < max_period:
        out.append(c)
        c *= 2
    out.append(max_period)
    return out


def search(cfg: ChiSearchConfig, workers: int = 1) -> ChiSearchResult:
    """Maximum repeatable ratio with repetition length <= cfg.max_period.

    The incumbent is seeded with short cycles and grown through a ladder of
    column-sum caps with iteratively deepened period bounds; each stage is
    exhaustive within its caps, so the last stage (full caps, full period
    bound) certifies the optimum.  Deterministic, including the expansion
    counter, for any worker count.
    """
    incumbent = _Incumbent()
    seed = seed_short_cycles(cfg)
    if seed is not None:
        incumbent.offer(seed)
    expanded = 0
    for cap in _cap_ladder(cfg):
        sub = cfg.with_cap(cap)
        engine = ChiEngine(sub, incumbent, workers)
        try:
            for bound in _period_schedule(cfg.max_period):
                engine.run_pass(bound)
        finally:
            engine.close()
        expanded += engine.states_expanded
    best = incumbent.best
    if best is None:
        return ChiSearchResult(None, None, expanded, cfg)
    neg_ratio, period, canon = best
    witness = ClumpMatrix(cfg.chi, list(canon), "block")
    ratio = -neg_ratio
    assert checked_block_ratio(witness, cfg.delta) == ratio
    return ChiSearchResult(ratio, witness, expanded, cfg, period)
