"""Game kinds, winning-set generation and maintenance, winner detection.

The enumerative games (Hamiltonicity, Hamiltonian Path, Fixed Hamiltonian
Path) pre-generate every winning set as an edge set and keep the family
incrementally updated during search: a Breaker claim kills every live set
containing the edge, a Maker claim advances per-set completion counters.
Connectivity and Perfect Matching use structural winner checks instead;
their winning-set families (spanning trees, matchings) are far too
numerous to enumerate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .board import (
    Board,
    BREAKER,
    EdgeId,
    MAKER,
    Player,
    edge_index,
    num_edges,
)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*a, **k):  # type: ignore[misc]
        def deco(f):
            return f

        return deco if not (a and callable(a[0])) else a[0]


KINDS = ("ham", "hp", "fhp", "conn", "pm")
ENUMERATIVE_KINDS = ("ham", "hp", "fhp")


# JIT kernels for the per-move family updates.  These run once per node of
# every search, so the numpy whole-array formulation (kept below as the
# no-numba fallback) is replaced by tight loops over the few sets that
# actually contain the played edge.


@njit(cache=True)
def _k_apply_maker(e, es_pad, es_len, alive, cnt, need, hist):
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
    return newly


@njit(cache=True)
def _k_undo_maker(e, es_pad, es_len, alive, cnt, need, hist):
    for t in range(es_len[e]):
        s = es_pad[e, t]
        cnt[s] -= 1
        if alive[s]:
            d = need[s] - cnt[s]
            hist[d] += 1
            hist[d - 1] -= 1


@njit(cache=True)
def _k_apply_breaker(e, es_pad, es_len, alive, cnt, need, hist, rows,
                     edge_alive_cnt, kill_stack, sp):
    k = 0
    for t in range(es_len[e]):
        s = es_pad[e, t]
        if alive[s]:
            hist[need[s] - cnt[s]] -= 1
            alive[s] = False
            kill_stack[sp + k] = s
            k += 1
            for j in range(rows.shape[1]):
                edge_alive_cnt[rows[s, j]] -= 1
    return k


@njit(cache=True)
def _k_undo_breaker(alive, cnt, need, hist, rows, edge_alive_cnt,
                    kill_stack, sp, k):
    for i in range(k):
        s = kill_stack[sp + i]
        alive[s] = True
        hist[need[s] - cnt[s]] += 1
        for j in range(rows.shape[1]):
            edge_alive_cnt[rows[s, j]] += 1


@njit(cache=True)
def _k_two_threats(states, alive, cnt, need, rows):
    """First two distinct free edges each completing a deficit-1 alive
    set, in ascending set order; -1 placeholders when fewer exist."""
    t1 = -1
    t2 = -1
    for s in range(alive.shape[0]):
        if alive[s] and need[s] - cnt[s] == 1:
            for j in range(rows.shape[1]):
                e = rows[s, j]
                if states[e] == 0:
                    if t1 == -1:
                        t1 = e
                    elif e != t1:
                        return t1, e
                    break
    return t1, t2


class UnsupportedKindError(ValueError):
    """Enumerative winning-set generation requested for a structural kind."""


class InconsistentFamilyError(RuntimeError):
    """Family updates fell out of lockstep with the board."""


@dataclass(frozen=True)
class GameSpec:
    """Which game is being played, on what board."""

    kind: str
    n: int
    fixed_pair: tuple[int, int] | None = None
    absent_edges: tuple[EdgeId, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        if self.kind == "pm":
            if self.n < 2 or self.n % 2:
                raise ValueError("perfect matching game needs even n >= 2")
        elif self.kind == "conn":
            if self.n < 2:
                raise ValueError("connectivity game needs n >= 2")
        elif self.n < 4:
            raise ValueError(f"{self.kind} game needs n >= 4")
        if self.kind == "fhp":
            if self.fixed_pair is None:
                raise ValueError("fhp needs a fixed vertex pair")
            u, v = self.fixed_pair
            if u == v or not (0 <= u < self.n) or not (0 <= v < self.n):
                raise ValueError(f"invalid fixed pair {self.fixed_pair}")
        elif self.fixed_pair is not None:
            raise ValueError(f"fixed pair is only valid for fhp, not {self.kind}")

    def make_board(self) -> Board:
        return Board(self.n, self.absent_edges)

    @property
    def num_free_edges(self) -> int:
        return num_edges(self.n) - len(set(self.absent_edges))


def _ham_cycles(n: int) -> list[tuple[int, ...]]:
    """All (n-1)!/2 Hamiltonian cycles of K_n as vertex sequences.

    Vertex 0 is pinned first and the two traversal directions are
    deduplicated by requiring the second vertex below the last.
    """
    out = []
    for perm in permutations(range(1, n)):
        if perm[0] < perm[-1]:
            out.append((0,) + perm)
    return out


def _ham_paths(n: int) -> list[tuple[int, ...]]:
    """All n!/2 Hamiltonian paths of K_n (reversal-deduplicated)."""
    return [p for p in permutations(range(n)) if p[0] < p[-1]]


def _fixed_paths(n: int, u: int, v: int) -> list[tuple[int, ...]]:
    middle = [x for x in range(n) if x not in (u, v)]
    return [(u,) + p + (v,) for p in permutations(middle)]


def _cycle_edges(seq: tuple[int, ...], n: int) -> tuple[EdgeId, ...]:
    return tuple(
        edge_index(seq[i], seq[(i + 1) % len(seq)], n) for i in range(len(seq))
    )


def _path_edges(seq: tuple[int, ...], n: int) -> tuple[EdgeId, ...]:
    return tuple(edge_index(seq[i], seq[i + 1], n) for i in range(len(seq) - 1))


class WinningSetFamily:
    """Bitset family of Breaker-free winning sets with Maker counters.

    ``alive[s]`` stays true while set s contains no Breaker edge.
    ``cnt[s]`` counts Maker-claimed edges of set s.  ``n_complete`` counts
    alive sets fully claimed by Maker (a complete set can never be killed,
    since all of its edges already belong to Maker).  All updates are
    exactly undoable via an internal log and must mirror the board's
    do_move/revert_move calls one for one.
    """

    __slots__ = (
        "sets",
        "need",
        "cnt",
        "alive",
        "alive_count",
        "n_complete",
        "edge_sets",
        "num_edge_slots",
        "edge_alive_cnt",
        "_hist",
        "_rows",
        "_es_pad",
        "_es_len",
        "_kill_stack",
        "_ksp",
        "_log",
    )

    def __init__(self, sets: list[tuple[EdgeId, ...]], num_edge_slots: int):
        self.sets = sets
        self.num_edge_slots = num_edge_slots
        S = len(sets)
        self.need = np.array([len(s) for s in sets], dtype=np.int64)
        self.cnt = np.zeros(S, dtype=np.int64)
        self.alive = np.ones(S, dtype=bool)
        self.alive_count = S
        self.n_complete = 0
        by_edge: list[list[int]] = [[] for _ in range(num_edge_slots)]
        for si, s in enumerate(sets):
            for e in s:
                by_edge[e].append(si)
        self.edge_sets = [np.array(ix, dtype=np.int64) for ix in by_edge]
        # _hist[d] = number of alive sets at deficit d (edges Maker still
        # needs); maintained incrementally so min_alive_deficit is O(max d)
        max_need = int(self.need.max()) if S else 0
        self._hist = np.bincount(self.need, minlength=max_need + 1).astype(np.int64)
        # edge_alive_cnt[e] = number of alive sets containing e; an edge in
        # none is dead weight for both players (see solver move filtering)
        self.edge_alive_cnt = np.array(
            [len(ix) for ix in by_edge], dtype=np.int64
        )
        # row-matrix form of the sets (uniform length per game kind)
        uniform = S == 0 or int(self.need.min()) == max_need
        self._rows = (
            np.array(sets, dtype=np.int64) if uniform and S else None
        )
        # padded edge -> set-ids table for the JIT kernels
        width = max((len(ix) for ix in by_edge), default=0)
        self._es_pad = np.zeros((num_edge_slots, max(width, 1)), dtype=np.int64)
        self._es_len = np.zeros(num_edge_slots, dtype=np.int64)
        for e, ix in enumerate(by_edge):
            self._es_len[e] = len(ix)
            self._es_pad[e, : len(ix)] = ix
        # every set dies at most once along a play line, so a stack of S
        # slots always suffices for the breaker kill log
        self._kill_stack = np.zeros(max(S, 1), dtype=np.int64)
        self._ksp = 0
        self._log: list = []

    @property
    def _use_kernels(self) -> bool:
        return HAVE_NUMBA and self._rows is not None

    def __len__(self) -> int:
        return len(self.sets)

    def apply(self, e: EdgeId, p: Player) -> None:
        if self._use_kernels:
            if p == MAKER:
                newly = int(_k_apply_maker(e, self._es_pad, self._es_len,
                                           self.alive, self.cnt, self.need,
                                           self._hist))
                self.n_complete += newly
                self._log.append((e, p, newly))
            else:
                k = int(_k_apply_breaker(e, self._es_pad, self._es_len,
                                         self.alive, self.cnt, self.need,
                                         self._hist, self._rows,
                                         self.edge_alive_cnt,
                                         self._kill_stack, self._ksp))
                self._ksp += k
                self.alive_count -= k
                self._log.append((e, p, k))
            return
        idx = self.edge_sets[e]
        hist = self._hist
        live = idx[self.alive[idx]]
        ds = self.need[live] - self.cnt[live]
        if p == MAKER:
            # a live set containing the (previously free) edge e has
            # deficit >= 1, so ds - 1 is a valid histogram slot
            hist -= np.bincount(ds, minlength=len(hist))
            hist += np.bincount(ds - 1, minlength=len(hist))
            self.cnt[idx] += 1
            newly = int(np.count_nonzero(ds == 1))
            self.n_complete += newly
            self._log.append((e, p, newly))
        else:
            hist -= np.bincount(ds, minlength=len(hist))
            self.alive[live] = False
            self.alive_count -= len(live)
            self._kill_edges(live, -1)
            self._log.append((e, p, live))

    def undo(self, e: EdgeId, p: Player) -> None:
        if not self._log:
            raise InconsistentFamilyError("undo with empty log")
        le, lp, payload = self._log[-1]
        if (le, lp) != (e, p):
            raise InconsistentFamilyError(f"undo({e},{p}) does not match log ({le},{lp})")
        self._log.pop()
        if self._use_kernels:
            if p == MAKER:
                self.n_complete -= payload
                # undo is LIFO, so alive[] matches its state at apply() time
                _k_undo_maker(e, self._es_pad, self._es_len, self.alive,
                              self.cnt, self.need, self._hist)
            else:
                self._ksp -= payload
                self.alive_count += payload
                _k_undo_breaker(self.alive, self.cnt, self.need, self._hist,
                                self._rows, self.edge_alive_cnt,
                                self._kill_stack, self._ksp, payload)
            return
        hist = self._hist
        if p == MAKER:
            self.n_complete -= payload
            idx = self.edge_sets[e]
            self.cnt[idx] -= 1
            # undo is LIFO, so alive[] matches its state at apply() time
            live = idx[self.alive[idx]]
            ds = self.need[live] - self.cnt[live]
            hist += np.bincount(ds, minlength=len(hist))
            hist -= np.bincount(ds - 1, minlength=len(hist))
        else:
            self.alive[payload] = True
            self.alive_count += len(payload)
            self._kill_edges(payload, +1)
            ds = self.need[payload] - self.cnt[payload]
            hist += np.bincount(ds, minlength=len(hist))

    def _kill_edges(self, set_ids: np.ndarray, sign: int) -> None:
        if len(set_ids) == 0:
            return
        if self._rows is not None:
            touched = self._rows[set_ids].ravel()
        else:
            touched = np.concatenate([np.array(self.sets[s]) for s in set_ids])
        delta = np.bincount(touched, minlength=self.num_edge_slots)
        if sign > 0:
            self.edge_alive_cnt += delta
        else:
            self.edge_alive_cnt -= delta

    def maker_has_complete_set(self) -> bool:
        return self.n_complete > 0

    def breaker_killed_all(self) -> bool:
        return self.alive_count == 0

    def min_alive_deficit(self) -> int:
        """Smallest number of edges Maker still needs to finish some alive
        set; a large sentinel when nothing is alive."""
        hist = self._hist
        for d in range(len(hist)):
            if hist[d]:
                return d
        return 1 << 14

    def deficit_one_count(self) -> int:
        return int(self._hist[1]) if len(self._hist) > 1 else 0

    def threat_edges(self, board: Board, limit: int = 2) -> list[EdgeId]:
        """Distinct free edges completing some deficit-1 alive set, up to
        `limit`.  Each such set has exactly one non-Maker edge and it is
        free (the set is alive)."""
        if limit == 2 and self._use_kernels:
            t1, t2 = _k_two_threats(
                np.frombuffer(bytes(board.states), dtype=np.uint8),
                self.alive, self.cnt, self.need, self._rows,
            )
            return [e for e in (int(t1), int(t2)) if e >= 0]
        out: list[EdgeId] = []
        ids = np.nonzero(self.alive & (self.need - self.cnt == 1))[0]
        states = board.states
        for s in ids:
            for e in self.sets[s]:
                if states[e] == 0:
                    if e not in out:
                        out.append(e)
                        if len(out) >= limit:
                            return out
                    break
        return out

    def pristine_copy(self) -> "WinningSetFamily":
        """Fresh family sharing the immutable set structure (the expensive
        part); only valid on a family with no moves applied."""
        if self._log:
            raise InconsistentFamilyError("pristine_copy of a mutated family")
        new = object.__new__(WinningSetFamily)
        new.sets = self.sets
        new.need = self.need
        new.edge_sets = self.edge_sets
        new.num_edge_slots = self.num_edge_slots
        new._rows = self._rows
        new._es_pad = self._es_pad
        new._es_len = self._es_len
        new._kill_stack = np.zeros_like(self._kill_stack)
        new._ksp = 0
        new.cnt = self.cnt.copy()
        new.alive = self.alive.copy()
        new.alive_count = self.alive_count
        new.n_complete = self.n_complete
        new._hist = self._hist.copy()
        new.edge_alive_cnt = self.edge_alive_cnt.copy()
        new._log = []
        return new

    def snapshot(self) -> tuple:
        return (self.cnt.copy(), self.alive.copy(), self.alive_count, self.n_complete)

    def replay_equal(self, board: Board) -> bool:
        """Rebuild from the board's history and compare (debug check)."""
        fresh = WinningSetFamily(self.sets, self.num_edge_slots)
        for e, p in board.history:
            fresh.apply(e, p)
        return (
            np.array_equal(fresh.cnt, self.cnt)
            and np.array_equal(fresh.alive, self.alive)
            and fresh.alive_count == self.alive_count
            and fresh.n_complete == self.n_complete
            and np.array_equal(fresh._hist, self._hist)
            and np.array_equal(fresh.edge_alive_cnt, self.edge_alive_cnt)
        )


def generate_winning_sets(spec: GameSpec) -> WinningSetFamily:
    """Complete, duplicate-free enumeration of the winning sets.

    ham: all (n-1)!/2 Hamiltonian cycles (n edges each);
    hp: all n!/2 Hamiltonian paths (n-1 edges);
    fhp: all (n-2)! Hamiltonian u-v paths (n-1 edges, never using (u,v)).
    For host graphs, sets touching an absent edge are dropped.
    """
    n = spec.n
    if spec.kind == "ham":
        seqs = _ham_cycles(n)
        edge_sets = [_cycle_edges(s, n) for s in seqs]
    elif spec.kind == "hp":
        seqs = _ham_paths(n)
        edge_sets = [_path_edges(s, n) for s in seqs]
    elif spec.kind == "fhp":
        u, v = spec.fixed_pair  # type: ignore[misc]
        seqs = _fixed_paths(n, u, v)
        edge_sets = [_path_edges(s, n) for s in seqs]
    else:
        raise UnsupportedKindError(
            f"{spec.kind} uses structural winner detection, not enumerated sets"
        )
    if spec.absent_edges:
        absent = set(spec.absent_edges)
        edge_sets = [s for s in edge_sets if not absent & set(s)]
    return WinningSetFamily(edge_sets, num_edges(n))


# --- structural winner checks -------------------------------------------


def _connected_spanning(adj: list[int], n: int) -> bool:
    """Does the bitmask adjacency describe a connected spanning graph?"""
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        m = frontier
        while m:
            vbit = m & -m
            nxt |= adj[vbit.bit_length() - 1]
            m ^= vbit
        frontier = nxt & ~seen
        seen |= frontier
    return seen == (1 << n) - 1


def _has_perfect_matching(adj: list[int], n: int) -> bool:
    full = (1 << n) - 1

    def rec(unmatched: int) -> bool:
        if unmatched == 0:
            return True
        vbit = unmatched & -unmatched
        v = vbit.bit_length() - 1
        rest = unmatched ^ vbit
        cands = adj[v] & rest
        while cands:
            ubit = cands & -cands
            if rec(rest ^ ubit):
                return True
            cands ^= ubit
        return False

    return rec(full)


def _maker_or_free_adj(board: Board) -> list[int]:
    n = board.n
    full = (1 << n) - 1
    return [
        full & ~(board.breaker_adj[v] | board.absent_adj[v] | (1 << v))
        for v in range(n)
    ]


def player_wins(board: Board, fam: WinningSetFamily | None, spec: GameSpec, p: Player) -> bool:
    """Has player p already won?  Meant to be called right after p's move.

    Enumerative kinds: Maker wins when some Breaker-free set is fully his;
    Breaker wins when no winning set is Breaker-free.  Structural kinds
    check the goal structure on Maker's graph (Maker) or its impossibility
    on Maker-plus-free edges (Breaker).
    """
    if spec.kind in ENUMERATIVE_KINDS:
        assert fam is not None
        if p == MAKER:
            return fam.maker_has_complete_set()
        return fam.breaker_killed_all()
    if spec.kind == "conn":
        if p == MAKER:
            return _connected_spanning(board.maker_adj, board.n)
        return not _connected_spanning(_maker_or_free_adj(board), board.n)
    if spec.kind == "pm":
        if p == MAKER:
            return _has_perfect_matching(board.maker_adj, board.n)
        return not _has_perfect_matching(_maker_or_free_adj(board), board.n)
    raise ValueError(spec.kind)


_FAMILY_TEMPLATES: dict[GameSpec, WinningSetFamily] = {}


def make_family(spec: GameSpec) -> WinningSetFamily | None:
    """Family for enumerative kinds, None for structural ones.

    Generation is cached per spec (it enumerates factorially many sets);
    callers get independent pristine copies.
    """
    if spec.kind not in ENUMERATIVE_KINDS:
        return None
    tmpl = _FAMILY_TEMPLATES.get(spec)
    if tmpl is None:
        tmpl = _FAMILY_TEMPLATES[spec] = generate_winning_sets(spec)
    return tmpl.pristine_copy()
