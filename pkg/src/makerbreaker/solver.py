"""Exact game-tree search with an isomorphism-keyed transposition table.

The search is boolean minimax over alternating claims: try each free edge
in heuristic order, declare the mover the winner as soon as a move wins
outright or leads to a position the mover wins, otherwise the opponent
wins.  Transposition-table entries are keyed by the canonical form of the
edge coloring (plus the player to move and the game kind), so all
isomorphic positions share one entry; with the table on, symmetric
opening moves are deduplicated automatically.

Move ordering: Maker tries free edges by non-decreasing ed_M, Breaker by
non-increasing ed_B, ties broken by ascending edge id.

Two exact cutoffs short-circuit hopeless subtrees for the enumerative
games (they never change the winner, only the node count):
  * Maker to move with an alive set one edge short wins immediately;
  * when every alive set needs more edges than Maker can still claim,
    Breaker wins.
Both can be disabled via SearchConfig for cross-validation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .board import (
    BREAKER,
    Board,
    EdgeId,
    MAKER,
    Player,
    other_player,
)
from .canon import CanonKeyer
from .games import ENUMERATIVE_KINDS, GameSpec, WinningSetFamily, make_family, player_wins

NAIVE_EDGE_LIMIT = 15


class IllegalStateError(RuntimeError):
    """Search entered on a terminal position."""


class BudgetExceededError(RuntimeError):
    """Wall-clock budget for a solve ran out."""


@dataclass
class SearchConfig:
    ordering: bool = True
    tt: bool = True
    tt_max_entries: int = 1 << 24
    tt_keep_depth: int = 12
    # canonicalization is the dominant per-node cost; positions with fewer
    # free edges than this are searched directly instead of keyed
    tt_min_free: int = 2
    cutoffs: bool = True
    budget_seconds: float | None = None


@dataclass
class SolveOutcome:
    winner: Player
    nodes_visited: int
    tt_hits: int
    elapsed: float

    @property
    def winner_name(self) -> str:
        return "Maker" if self.winner == MAKER else "Breaker"


class TranspositionTable:
    """Bounded map canonical-key -> (winner, depth) with depth-filtered
    eviction: on overflow every entry deeper than keep_depth is dropped;
    if the table is still full, deep inserts are silently discarded."""

    def __init__(self, max_entries: int = 1 << 24, keep_depth: int = 12):
        self.max_entries = max_entries
        self.keep_depth = keep_depth
        self.entries: dict[bytes, tuple[Player, int]] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: bytes) -> Player | None:
        hit = self.entries.get(key)
        return hit[0] if hit is not None else None

    def insert(self, key: bytes, winner: Player, depth: int) -> None:
        old = self.entries.get(key)
        if old is not None:
            if old[0] != winner:
                raise IllegalStateError("conflicting exact winners for one class")
            return
        if len(self.entries) >= self.max_entries:
            keep = self.keep_depth
            self.entries = {k: v for k, v in self.entries.items() if v[1] <= keep}
            if len(self.entries) >= self.max_entries and depth > keep:
                return
        self.entries[key] = (winner, depth)


class Engine:
    """A live position (board + winning-set family) with exact search.

    Owns mutable state; one engine per game.  The transposition table may
    be shared between engines of the same spec: entries are exact winners,
    so sharing changes speed only, never results.
    """

    def __init__(
        self,
        spec: GameSpec,
        config: SearchConfig | None = None,
        tt: TranspositionTable | None = None,
    ):
        self.spec = spec
        self.config = config or SearchConfig()
        self.board = spec.make_board()
        self.family = make_family(spec)
        self.tt = tt if tt is not None else TranspositionTable(
            self.config.tt_max_entries, self.config.tt_keep_depth
        )
        self.nodes = 0
        self.tt_hits = 0
        self._deadline: float | None = None
        # raw (labeling-dependent) position -> canonical key memo; identical
        # labeled positions recur often under different move orders
        self._key_cache: dict[bytes, bytes] = {}
        self._keyer = CanonKeyer(self.board.n, spec.fixed_pair, spec.kind)

    # -- position manipulation -------------------------------------------

    def do(self, e: EdgeId, p: Player) -> None:
        self.board.do_move(e, p)
        if self.family is not None:
            self.family.apply(e, p)

    def undo(self, e: EdgeId, p: Player) -> None:
        if self.family is not None:
            self.family.undo(e, p)
        self.board.revert_move(e, p)

    def won_by(self, p: Player) -> bool:
        return player_wins(self.board, self.family, self.spec, p)

    # -- search ------------------------------------------------------------

    def order_moves(self, p: Player) -> list[EdgeId]:
        """Free edges sorted by the edge-degree heuristic (stable)."""
        board = self.board
        deg = board.maker_deg if p == MAKER else board.breaker_deg
        pairs = board.pairs
        states = board.states
        free = [e for e in range(board.E) if states[e] == 0]
        sign = 1 if p == MAKER else -1
        free.sort(key=lambda e: sign * (deg[pairs[e][0]] + deg[pairs[e][1]]))
        return free

    _KEY_CACHE_MAX = 1 << 20

    def _key(self, p: Player) -> bytes:
        raw = bytes(self.board.states) + bytes([p])
        key = self._key_cache.get(raw)
        if key is None:
            key = self._keyer(self.board, p)
            if len(self._key_cache) >= self._KEY_CACHE_MAX:
                self._key_cache.clear()
            self._key_cache[raw] = key
        return key

    def play(self, p: Player, depth: int = 0) -> Player:
        """Winner of the current position with p to move (Algorithm-1
        style boolean minimax)."""
        if self.board.free_count == 0:
            raise IllegalStateError("play() on a board with no free edges")
        cfg = self.config
        board = self.board
        fam = self.family
        self.nodes += 1
        if self._deadline is not None and self.nodes % 4096 == 0:
            if time.monotonic() > self._deadline:
                raise BudgetExceededError()

        forced: EdgeId | None = None
        if cfg.cutoffs and fam is not None:
            deficit = fam.min_alive_deficit()
            if p == MAKER and deficit == 1:
                return MAKER
            free = board.free_count
            maker_moves_left = (free + 1) // 2 if p == MAKER else free // 2
            if deficit > maker_moves_left:
                return BREAKER
            if p == BREAKER and fam.deficit_one_count():
                threats = fam.threat_edges(board, limit=2)
                if len(threats) > 1:
                    # two one-edge-short sets needing different edges:
                    # Breaker blocks one, Maker completes the other
                    return MAKER
                forced = threats[0]

        key: bytes | None = None
        if cfg.tt and board.free_count >= cfg.tt_min_free:
            key = self._key(p)
            hit = self.tt.get(key)
            if hit is not None:
                self.tt_hits += 1
                return hit

        if forced is not None:
            moves: list[EdgeId] = [forced]
        elif cfg.ordering:
            moves = self.order_moves(p)
        else:
            moves = [e for e in range(board.E) if board.states[e] == 0]
        if forced is None and cfg.cutoffs and fam is not None:
            # edges in no alive set are dominated for both players: for
            # Maker they advance nothing, for Breaker they kill nothing;
            # either player wins with such a move only if some undominated
            # move also wins (extra claimed edges never hurt their owner)
            alive_cnt = fam.edge_alive_cnt
            moves = [e for e in moves if alive_cnt[e]]
        opp = other_player(p)
        winner = opp
        for e in moves:
            self.do(e, p)
            if self.won_by(p):
                w = p
            else:
                w = self.play(opp, depth + 1)
            self.undo(e, p)
            if w == p:
                winner = p
                break
        if key is not None:
            self.tt.insert(key, winner, depth)
        return winner

    def best_move(self, p: Player) -> EdgeId | None:
        """A move preserving p's win, or None when p loses the position."""
        if self.board.free_count == 0:
            raise IllegalStateError("best_move on a terminal position")
        opp = other_player(p)
        moves = self.order_moves(p)
        # cheap pass: immediate wins and children already proven in the TT
        deferred = []
        for e in moves:
            self.do(e, p)
            if self.won_by(p):
                self.undo(e, p)
                return e
            hit = None
            if self.config.tt and self.board.free_count >= self.config.tt_min_free:
                hit = self.tt.get(self._key(opp))
            self.undo(e, p)
            if hit == p:
                return e
            if hit is None:
                deferred.append(e)
        for e in deferred:
            self.do(e, p)
            w = self.play(opp, 1) if self.board.free_count else opp
            self.undo(e, p)
            if w == p:
                return e
        return None


def order_moves(board: Board, p: Player) -> list[EdgeId]:
    """Standalone edge-degree move ordering (see Engine.order_moves)."""
    deg = board.maker_deg if p == MAKER else board.breaker_deg
    pairs = board.pairs
    free = board.free_edges()
    sign = 1 if p == MAKER else -1
    free.sort(key=lambda e: sign * (deg[pairs[e][0]] + deg[pairs[e][1]]))
    return free


def solve(
    spec: GameSpec,
    first: Player,
    config: SearchConfig | None = None,
    tt: TranspositionTable | None = None,
) -> SolveOutcome:
    """Winner of the full game from the empty board with `first` to move."""
    engine = Engine(spec, config, tt)
    if config is not None and config.budget_seconds is not None:
        engine._deadline = time.monotonic() + config.budget_seconds
    t0 = time.perf_counter()
    winner = _solve_enum_no_tt(engine, first)
    if winner is None and tt is None:
        winner = _solve_enum_tt(engine, first)
    if winner is None:
        winner = engine.play(first)
    elapsed = time.perf_counter() - t0
    return SolveOutcome(winner, engine.nodes, engine.tt_hits, elapsed)


try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


if _HAVE_NUMBA:
    import numpy as _np

    @_njit(cache=True)
    def _naive_enum_minimax(states, first, es_pad, es_len, need, cnt, alive,
                            kill_stack):
        """Exhaustive minimax over free edges in index order, iteratively.

        Identical game tree to the pure-Python recursion below: no
        transposition table, no move ordering, no cutoffs; the mover wins
        as soon as his move completes a set (Maker) or kills the last
        alive set (Breaker).  Returns (winner, nodes)."""
        E = states.shape[0]
        free0 = 0
        for e in range(E):
            if states[e] == 0:
                free0 += 1
        alive_count = 0
        for s in range(alive.shape[0]):
            if alive[s]:
                alive_count += 1
        complete = 0
        pos = _np.zeros(free0 + 2, dtype=_np.int64)
        cur = _np.full(free0 + 2, -1, dtype=_np.int64)
        kc = _np.zeros(free0 + 2, dtype=_np.int64)
        newly = _np.zeros(free0 + 2, dtype=_np.int64)
        ksp = 0
        nodes = 0
        depth = 0
        result = 0
        have_result = False
        while True:
            p = first if depth % 2 == 0 else 3 - first
            if have_result:
                e = cur[depth]
                if p == 1:  # un-apply Maker
                    for t in range(es_len[e]):
                        cnt[es_pad[e, t]] -= 1
                    complete -= newly[depth]
                else:  # un-apply Breaker
                    k = kc[depth]
                    ksp -= k
                    for i in range(k):
                        alive[kill_stack[ksp + i]] = True
                    alive_count += k
                states[e] = 0
                cur[depth] = -1
                if result == p:
                    pos[depth] = 0
                    if depth == 0:
                        return result, nodes
                    depth -= 1
                    continue
                have_result = False
                continue
            e = -1
            i = pos[depth]
            while i < E:
                if states[i] == 0:
                    e = i
                    break
                i += 1
            if e == -1:  # no free edge: the mover cannot win anymore
                result = 3 - p
                pos[depth] = 0
                if depth == 0:
                    return result, nodes
                depth -= 1
                have_result = True
                continue
            if pos[depth] == 0:
                nodes += 1
            pos[depth] = e + 1
            states[e] = p
            cur[depth] = e
            won = False
            if p == 1:
                nw = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s] and need[s] - cnt[s] == 1:
                        nw += 1
                    cnt[s] += 1
                newly[depth] = nw
                complete += nw
                won = complete > 0
            else:
                k = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s]:
                        alive[s] = False
                        kill_stack[ksp + k] = s
                        k += 1
                ksp += k
                kc[depth] = k
                alive_count -= k
                won = alive_count == 0
            if won:
                result = p
                have_result = True
                continue
            depth += 1


if _HAVE_NUMBA:

    @_njit(cache=True)
    def _naive_enum_minimax_small(states, first, es_pad, es_len,
                                  set_edge_mask, edge_set_mask):
        """Same exhaustive index-order minimax, specialized for families
        with at most 62 winning sets: the alive sets are one int64
        bitmask and completion is a subset test against Maker's claimed
        edge mask, so apply/undo are O(1).  Returns (winner, nodes)."""
        E = states.shape[0]
        S = set_edge_mask.shape[0]
        alive = (1 << S) - 1
        maker_mask = 0
        free0 = 0
        for e in range(E):
            if states[e] == 0:
                free0 += 1
        pos = _np.zeros(free0 + 2, dtype=_np.int64)
        cur = _np.full(free0 + 2, -1, dtype=_np.int64)
        saved_alive = _np.zeros(free0 + 2, dtype=_np.int64)
        nodes = 0
        depth = 0
        result = 0
        have_result = False
        while True:
            p = first if depth % 2 == 0 else 3 - first
            if have_result:
                e = cur[depth]
                if p == 1:
                    maker_mask &= ~(1 << e)
                else:
                    alive = saved_alive[depth]
                states[e] = 0
                cur[depth] = -1
                if result == p:
                    pos[depth] = 0
                    if depth == 0:
                        return result, nodes
                    depth -= 1
                    continue
                have_result = False
                continue
            e = -1
            i = pos[depth]
            while i < E:
                if states[i] == 0:
                    e = i
                    break
                i += 1
            if e == -1:
                result = 3 - p
                pos[depth] = 0
                if depth == 0:
                    return result, nodes
                depth -= 1
                have_result = True
                continue
            if pos[depth] == 0:
                nodes += 1
            pos[depth] = e + 1
            states[e] = p
            cur[depth] = e
            won = False
            if p == 1:
                maker_mask |= 1 << e
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if (alive >> s) & 1 and set_edge_mask[s] & ~maker_mask == 0:
                        won = True
                        break
            else:
                saved_alive[depth] = alive
                alive &= ~edge_set_mask[e]
                won = alive == 0
            if won:
                result = p
                have_result = True
                continue
            depth += 1


if _HAVE_NUMBA:

    @_njit(cache=True)
    def _engine_enum_no_tt(states, first, ordering, cutoffs, pu, pv,
                           maker_deg, breaker_deg, es_pad, es_len, need,
                           cnt, alive, hist, edge_alive_cnt, rows,
                           kill_stack):
        """Engine.play specialized to enumerative games without a
        transposition table, move for move: same exact cutoffs, same
        forced-threat handling, same dominated-edge filter, and the same
        stable edge-degree ordering, so it visits the identical node
        sequence as the Python search.  Returns (winner, nodes)."""
        E = states.shape[0]
        S = alive.shape[0]
        H = hist.shape[0]
        L = rows.shape[1]
        free_count = 0
        for e in range(E):
            if states[e] == 0:
                free_count += 1
        alive_count = 0
        for s in range(S):
            if alive[s]:
                alive_count += 1
        n_complete = 0
        maxd = free_count + 2
        mbuf = _np.zeros((maxd, E), dtype=_np.int64)
        mlen = _np.zeros(maxd, dtype=_np.int64)
        mpos = _np.full(maxd, -1, dtype=_np.int64)
        cur = _np.full(maxd, -1, dtype=_np.int64)
        nw = _np.zeros(maxd, dtype=_np.int64)
        kc = _np.zeros(maxd, dtype=_np.int64)
        ksp = 0
        nodes = 0
        depth = 0
        result = 0
        have_result = False
        while True:
            p = first if depth % 2 == 0 else 3 - first
            if have_result:
                e = cur[depth]
                u = pu[e]
                v = pv[e]
                states[e] = 0
                free_count += 1
                if p == 1:
                    maker_deg[u] -= 1
                    maker_deg[v] -= 1
                    n_complete -= nw[depth]
                    for t in range(es_len[e]):
                        s = es_pad[e, t]
                        cnt[s] -= 1
                        if alive[s]:
                            d = need[s] - cnt[s]
                            hist[d] += 1
                            hist[d - 1] -= 1
                else:
                    breaker_deg[u] -= 1
                    breaker_deg[v] -= 1
                    k = kc[depth]
                    ksp -= k
                    alive_count += k
                    for i in range(k):
                        s = kill_stack[ksp + i]
                        alive[s] = True
                        hist[need[s] - cnt[s]] += 1
                        for j in range(L):
                            edge_alive_cnt[rows[s, j]] += 1
                cur[depth] = -1
                if result == p:
                    mpos[depth] = -1
                    if depth == 0:
                        return result, nodes
                    depth -= 1
                    continue
                have_result = False
            if mpos[depth] == -1:
                # node entry: count it, run the cutoffs, build the moves
                nodes += 1
                forced = -1
                if cutoffs:
                    mind = 1 << 14
                    for d in range(H):
                        if hist[d] > 0:
                            mind = d
                            break
                    if p == 1 and mind == 1:
                        result = 1
                        if depth == 0:
                            return result, nodes
                        depth -= 1
                        have_result = True
                        continue
                    mml = (free_count + 1) // 2 if p == 1 else free_count // 2
                    if mind > mml:
                        result = 2
                        if depth == 0:
                            return result, nodes
                        depth -= 1
                        have_result = True
                        continue
                    if p == 2 and H > 1 and hist[1] > 0:
                        t1 = -1
                        t2 = -1
                        for s in range(S):
                            if alive[s] and need[s] - cnt[s] == 1:
                                for j in range(L):
                                    ee = rows[s, j]
                                    if states[ee] == 0:
                                        if t1 == -1:
                                            t1 = ee
                                        elif ee != t1:
                                            t2 = ee
                                        break
                            if t2 != -1:
                                break
                        if t2 != -1:
                            result = 1
                            if depth == 0:
                                return result, nodes
                            depth -= 1
                            have_result = True
                            continue
                        forced = t1
                if forced >= 0:
                    mbuf[depth, 0] = forced
                    mlen[depth] = 1
                else:
                    m = 0
                    for e in range(E):
                        if states[e] == 0 and (not cutoffs or edge_alive_cnt[e] > 0):
                            mbuf[depth, m] = e
                            m += 1
                    mlen[depth] = m
                    if ordering and m > 1:
                        # stable insertion sort: Maker ascending combined
                        # edge degree, Breaker descending
                        deg = maker_deg if p == 1 else breaker_deg
                        sign = 1 if p == 1 else -1
                        for i in range(1, m):
                            e = mbuf[depth, i]
                            key = sign * (deg[pu[e]] + deg[pv[e]])
                            j = i - 1
                            while j >= 0:
                                f = mbuf[depth, j]
                                if sign * (deg[pu[f]] + deg[pv[f]]) > key:
                                    mbuf[depth, j + 1] = f
                                    j -= 1
                                else:
                                    break
                            mbuf[depth, j + 1] = e
                mpos[depth] = 0
            if mpos[depth] >= mlen[depth]:
                result = 3 - p
                mpos[depth] = -1
                if depth == 0:
                    return result, nodes
                depth -= 1
                have_result = True
                continue
            e = mbuf[depth, mpos[depth]]
            mpos[depth] += 1
            u = pu[e]
            v = pv[e]
            states[e] = p
            free_count -= 1
            cur[depth] = e
            won = False
            if p == 1:
                maker_deg[u] += 1
                maker_deg[v] += 1
                newly = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s]:
                        d = need[s] - cnt[s]
                        hist[d] -= 1
                        hist[d - 1] += 1
                        if d == 1:
                            newly += 1
                    cnt[s] += 1
                nw[depth] = newly
                n_complete += newly
                won = n_complete > 0
            else:
                breaker_deg[u] += 1
                breaker_deg[v] += 1
                k = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s]:
                        hist[need[s] - cnt[s]] -= 1
                        alive[s] = False
                        kill_stack[ksp + k] = s
                        k += 1
                        for j in range(L):
                            edge_alive_cnt[rows[s, j]] -= 1
                ksp += k
                kc[depth] = k
                alive_count -= k
                won = alive_count == 0
            if won:
                result = p
                have_result = True
                continue
            depth += 1


if _HAVE_NUMBA:
    from numba import objmode as _objmode, types as _nbtypes
    from numba.typed import Dict as _NbDict

    from .canon_fast import _canon_entry as _canon_cert_kernel

    _TT_KEY_TYPE = _nbtypes.UniTuple(_nbtypes.int64, 3)
    _TT_VAL_TYPE = _nbtypes.int64

    @_njit(cache=True)
    def _tt_insert(tt, key, winner, depth, cap, keep):
        """TranspositionTable.insert with values packed as
        winner | depth << 2: first write wins, and on overflow the table
        is rebuilt keeping only entries at depth <= keep (deep inserts
        are discarded while it stays full).  Returns the (possibly
        rebuilt) dict."""
        if key in tt:
            return tt
        if len(tt) >= cap:
            new = _NbDict.empty(key_type=_TT_KEY_TYPE, value_type=_TT_VAL_TYPE)
            for k, v in tt.items():
                if (v >> 2) <= keep:
                    new[k] = v
            tt = new
            if len(tt) >= cap and depth > keep:
                return tt
        tt[key] = winner | (depth << 2)
        return tt

    @_njit(cache=True)
    def _engine_enum_tt(states, first, ordering, cutoffs, pu, pv,
                        maker_deg, breaker_deg, es_pad, es_len, need,
                        cnt, alive, hist, edge_alive_cnt, rows, kill_stack,
                        madj, badj, aadj, use_absent, seed, nseed, n,
                        nbytes, pad, tt_min_free, tt_cap, keep_depth,
                        deadline):
        """Engine.play with the transposition table, compiled: the same
        cutoffs, forced-threat handling, dominated filter, stable
        ordering and depth-filtered table eviction as the Python search,
        with TT keys computed by the compiled canonical-labeling kernel.
        Returns (winner, nodes, tt_hits); winner 0 means the deadline
        passed."""
        E = states.shape[0]
        S = alive.shape[0]
        H = hist.shape[0]
        L = rows.shape[1]
        free_count = 0
        for e in range(E):
            if states[e] == 0:
                free_count += 1
        alive_count = 0
        for s in range(S):
            if alive[s]:
                alive_count += 1
        n_complete = 0
        maxd = free_count + 2
        mbuf = _np.zeros((maxd, E), dtype=_np.int64)
        mlen = _np.zeros(maxd, dtype=_np.int64)
        mpos = _np.full(maxd, -1, dtype=_np.int64)
        cur = _np.full(maxd, -1, dtype=_np.int64)
        nw = _np.zeros(maxd, dtype=_np.int64)
        kc = _np.zeros(maxd, dtype=_np.int64)
        k0 = _np.zeros(maxd, dtype=_np.int64)
        k1 = _np.zeros(maxd, dtype=_np.int64)
        k2 = _np.zeros(maxd, dtype=_np.int64)
        haskey = _np.zeros(maxd, dtype=_np.bool_)
        tt = _NbDict.empty(key_type=_TT_KEY_TYPE, value_type=_TT_VAL_TYPE)
        ksp = 0
        nodes = 0
        tt_hits = 0
        depth = 0
        result = 0
        have_result = False
        while True:
            p = first if depth % 2 == 0 else 3 - first
            if have_result:
                e = cur[depth]
                u = pu[e]
                v = pv[e]
                states[e] = 0
                free_count += 1
                if p == 1:
                    maker_deg[u] -= 1
                    maker_deg[v] -= 1
                    madj[u] &= ~(1 << v)
                    madj[v] &= ~(1 << u)
                    n_complete -= nw[depth]
                    for t in range(es_len[e]):
                        s = es_pad[e, t]
                        cnt[s] -= 1
                        if alive[s]:
                            d = need[s] - cnt[s]
                            hist[d] += 1
                            hist[d - 1] -= 1
                else:
                    breaker_deg[u] -= 1
                    breaker_deg[v] -= 1
                    badj[u] &= ~(1 << v)
                    badj[v] &= ~(1 << u)
                    k = kc[depth]
                    ksp -= k
                    alive_count += k
                    for i in range(k):
                        s = kill_stack[ksp + i]
                        alive[s] = True
                        hist[need[s] - cnt[s]] += 1
                        for j in range(L):
                            edge_alive_cnt[rows[s, j]] += 1
                cur[depth] = -1
                if result == p:
                    mpos[depth] = -1
                    if haskey[depth]:
                        tt = _tt_insert(tt, (k0[depth], k1[depth], k2[depth]),
                                        result, depth, tt_cap, keep_depth)
                    if depth == 0:
                        return result, nodes, tt_hits
                    depth -= 1
                    continue
                have_result = False
            if mpos[depth] == -1:
                nodes += 1
                if deadline > 0.0 and nodes % 4096 == 0:
                    now = 0.0
                    with _objmode(now="float64"):
                        now = time.monotonic()
                    if now > deadline:
                        return 0, nodes, tt_hits
                haskey[depth] = False
                forced = -1
                if cutoffs:
                    mind = 1 << 14
                    for d in range(H):
                        if hist[d] > 0:
                            mind = d
                            break
                    if p == 1 and mind == 1:
                        result = 1
                        if depth == 0:
                            return result, nodes, tt_hits
                        depth -= 1
                        have_result = True
                        continue
                    mml = (free_count + 1) // 2 if p == 1 else free_count // 2
                    if mind > mml:
                        result = 2
                        if depth == 0:
                            return result, nodes, tt_hits
                        depth -= 1
                        have_result = True
                        continue
                    if p == 2 and H > 1 and hist[1] > 0:
                        t1 = -1
                        t2 = -1
                        for s in range(S):
                            if alive[s] and need[s] - cnt[s] == 1:
                                for j in range(L):
                                    ee = rows[s, j]
                                    if states[ee] == 0:
                                        if t1 == -1:
                                            t1 = ee
                                        elif ee != t1:
                                            t2 = ee
                                        break
                            if t2 != -1:
                                break
                        if t2 != -1:
                            result = 1
                            if depth == 0:
                                return result, nodes, tt_hits
                            depth -= 1
                            have_result = True
                            continue
                        forced = t1
                if free_count >= tt_min_free:
                    cert, _perm = _canon_cert_kernel(
                        madj, badj, aadj, use_absent, seed, nseed, n,
                        nbytes, pad,
                    )
                    a = _np.int64(0)
                    b = _np.int64(0)
                    c = _np.int64(0)
                    stop = 8 if nbytes > 8 else nbytes
                    for t in range(stop):
                        a = (a << 8) | _np.int64(cert[t])
                    stop = 16 if nbytes > 16 else nbytes
                    for t in range(8, stop):
                        b = (b << 8) | _np.int64(cert[t])
                    for t in range(16, nbytes):
                        c = (c << 8) | _np.int64(cert[t])
                    c = (c << 1) | (1 if p == 1 else 0)
                    k0[depth] = a
                    k1[depth] = b
                    k2[depth] = c
                    haskey[depth] = True
                    key = (a, b, c)
                    if key in tt:
                        tt_hits += 1
                        result = int(tt[key]) & 3
                        if depth == 0:
                            return result, nodes, tt_hits
                        depth -= 1
                        have_result = True
                        continue
                if forced >= 0:
                    mbuf[depth, 0] = forced
                    mlen[depth] = 1
                else:
                    m = 0
                    for e in range(E):
                        if states[e] == 0 and (not cutoffs or edge_alive_cnt[e] > 0):
                            mbuf[depth, m] = e
                            m += 1
                    mlen[depth] = m
                    if ordering and m > 1:
                        deg = maker_deg if p == 1 else breaker_deg
                        sign = 1 if p == 1 else -1
                        for i in range(1, m):
                            e = mbuf[depth, i]
                            key_i = sign * (deg[pu[e]] + deg[pv[e]])
                            j = i - 1
                            while j >= 0:
                                f = mbuf[depth, j]
                                if sign * (deg[pu[f]] + deg[pv[f]]) > key_i:
                                    mbuf[depth, j + 1] = f
                                    j -= 1
                                else:
                                    break
                            mbuf[depth, j + 1] = e
                mpos[depth] = 0
            if mpos[depth] >= mlen[depth]:
                result = 3 - p
                mpos[depth] = -1
                if haskey[depth]:
                    tt = _tt_insert(tt, (k0[depth], k1[depth], k2[depth]),
                                    result, depth, tt_cap, keep_depth)
                if depth == 0:
                    return result, nodes, tt_hits
                depth -= 1
                have_result = True
                continue
            e = mbuf[depth, mpos[depth]]
            mpos[depth] += 1
            u = pu[e]
            v = pv[e]
            states[e] = p
            free_count -= 1
            cur[depth] = e
            won = False
            if p == 1:
                maker_deg[u] += 1
                maker_deg[v] += 1
                madj[u] |= 1 << v
                madj[v] |= 1 << u
                newly = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s]:
                        d = need[s] - cnt[s]
                        hist[d] -= 1
                        hist[d - 1] += 1
                        if d == 1:
                            newly += 1
                    cnt[s] += 1
                nw[depth] = newly
                n_complete += newly
                won = n_complete > 0
            else:
                breaker_deg[u] += 1
                breaker_deg[v] += 1
                badj[u] |= 1 << v
                badj[v] |= 1 << u
                k = 0
                for t in range(es_len[e]):
                    s = es_pad[e, t]
                    if alive[s]:
                        hist[need[s] - cnt[s]] -= 1
                        alive[s] = False
                        kill_stack[ksp + k] = s
                        k += 1
                        for j in range(L):
                            edge_alive_cnt[rows[s, j]] -= 1
                ksp += k
                kc[depth] = k
                alive_count -= k
                won = alive_count == 0
            if won:
                result = p
                have_result = True
                continue
            depth += 1


def _solve_enum_tt(engine: Engine, first: Player) -> Player | None:
    """Run the TT-enabled search through the compiled kernel when
    applicable (private unshared table, enumerative family with uniform
    set size, board small enough for the compiled canonical labeler);
    None means the caller must use the Python search."""
    cfg = engine.config
    fam = engine.family
    board = engine.board
    if (
        not _HAVE_NUMBA
        or not cfg.tt
        or fam is None
        or fam._rows is None
        or len(fam) == 0
        or board.free_count == 0
    ):
        return None
    from . import canon_fast

    if board.n > canon_fast.MAX_N:
        return None
    import numpy as np

    n = board.n
    full = (1 << n) - 1
    if engine.spec.fixed_pair is not None:
        u, v = engine.spec.fixed_pair
        pair_mask = (1 << u) | (1 << v)
        base = [pair_mask, full & ~pair_mask]
        if base[1] == 0:
            base = base[:1]
    else:
        base = [full]
    seed = np.array(base, dtype=np.int64)
    nbits = n * (n - 1) // 2 * 2
    nbytes = (nbits + 7) // 8
    pad = nbytes * 8 - nbits
    states = np.array(board.states, dtype=np.int8)
    pu = np.array([board.pairs[e][0] for e in range(board.E)], dtype=np.int64)
    pv = np.array([board.pairs[e][1] for e in range(board.E)], dtype=np.int64)
    winner, nodes, tt_hits = _engine_enum_tt(
        states, first, cfg.ordering, cfg.cutoffs, pu, pv,
        np.array(board.maker_deg, dtype=np.int64),
        np.array(board.breaker_deg, dtype=np.int64),
        fam._es_pad, fam._es_len, fam.need, fam.cnt.copy(),
        fam.alive.copy(), fam._hist.copy(), fam.edge_alive_cnt.copy(),
        fam._rows, np.zeros_like(fam._kill_stack),
        np.array(board.maker_adj, dtype=np.int64),
        np.array(board.breaker_adj, dtype=np.int64),
        np.array(board.absent_adj, dtype=np.int64),
        bool(any(board.absent_adj)), seed, len(seed), n, nbytes, pad,
        cfg.tt_min_free, cfg.tt_max_entries, cfg.tt_keep_depth,
        engine._deadline if engine._deadline is not None else 0.0,
    )
    engine.nodes = int(nodes)
    engine.tt_hits = int(tt_hits)
    if winner == 0:
        raise BudgetExceededError()
    return int(winner)


def _solve_enum_no_tt(engine: Engine, first: Player) -> Player | None:
    """Run Engine.play through the compiled kernel when applicable (no
    transposition table, no time budget, enumerative family with uniform
    set size); None means the caller must use the Python search."""
    cfg = engine.config
    fam = engine.family
    if (
        not _HAVE_NUMBA
        or cfg.tt
        or engine._deadline is not None
        or fam is None
        or fam._rows is None
        or len(fam) == 0
    ):
        return None
    import numpy as np

    board = engine.board
    states = np.array(board.states, dtype=np.int8)
    pu = np.array([board.pairs[e][0] for e in range(board.E)], dtype=np.int64)
    pv = np.array([board.pairs[e][1] for e in range(board.E)], dtype=np.int64)
    winner, nodes = _engine_enum_no_tt(
        states, first, cfg.ordering, cfg.cutoffs, pu, pv,
        np.array(board.maker_deg, dtype=np.int64),
        np.array(board.breaker_deg, dtype=np.int64),
        fam._es_pad, fam._es_len, fam.need, fam.cnt.copy(),
        fam.alive.copy(), fam._hist.copy(), fam.edge_alive_cnt.copy(),
        fam._rows, np.zeros_like(fam._kill_stack),
    )
    engine.nodes = int(nodes)
    return int(winner)


def _small_family_masks(fam):
    """(set_edge_mask, edge_set_mask) int64 arrays for a pristine family
    with <= 62 sets on <= 62 edges, or None if it does not fit."""
    import numpy as np

    S = len(fam.sets)
    E = fam._es_len.shape[0]
    if S == 0 or S > 62 or E > 62:
        return None
    set_edge_mask = np.zeros(S, dtype=np.int64)
    edge_set_mask = np.zeros(E, dtype=np.int64)
    for s, edges in enumerate(fam.sets):
        m = 0
        for e in edges:
            m |= 1 << e
            edge_set_mask[e] |= 1 << s
        set_edge_mask[s] = m
    return set_edge_mask, edge_set_mask


def naive_solve(spec: GameSpec, first: Player) -> Player:
    """Independent oracle: plain exhaustive minimax over free edges in
    index order; no transposition table, no ordering, no isomorphism
    pruning, no cutoffs.  Guarded to small boards.

    For enumerative games the identical tree walk runs as a compiled
    kernel; structural games use the pure-Python recursion."""
    if spec.num_free_edges > NAIVE_EDGE_LIMIT:
        raise ValueError(
            f"naive_solve refused: {spec.num_free_edges} edges > {NAIVE_EDGE_LIMIT}"
        )
    board = spec.make_board()
    fam = make_family(spec)
    if fam is not None and _HAVE_NUMBA and fam._rows is not None:
        import numpy as np

        states = np.array(board.states, dtype=np.int8)
        masks = _small_family_masks(fam)
        if masks is not None:
            winner, _nodes = _naive_enum_minimax_small(
                states, first, fam._es_pad, fam._es_len, masks[0], masks[1],
            )
        else:
            winner, _nodes = _naive_enum_minimax(
                states, first, fam._es_pad, fam._es_len, fam.need,
                fam.cnt, fam.alive, fam._kill_stack,
            )
        return int(winner)

    def rec(p: Player) -> Player:
        opp = other_player(p)
        for e in range(board.E):
            if board.states[e] != 0:
                continue
            board.do_move(e, p)
            if fam is not None:
                fam.apply(e, p)
            if player_wins(board, fam, spec, p):
                w = p
            else:
                w = rec(opp)
            if fam is not None:
                fam.undo(e, p)
            board.revert_move(e, p)
            if w == p:
                return p
        return opp

    return rec(first)


def best_move(
    board: Board,
    p: Player,
    spec: GameSpec,
    tt: TranspositionTable | None = None,
    config: SearchConfig | None = None,
) -> EdgeId | None:
    """best_move on an arbitrary board state (rebuilds the family)."""
    engine = Engine(spec, config, tt)
    for e, q in board.history:
        engine.do(e, q)
    return engine.best_move(p)
