"""Constructive Maker strategies and the sparse Hamiltonicity host graph.

Three executable strategies for Maker as second player:

* ``HamExtensionStrategy`` lifts a winning second-player strategy for the
  Hamiltonicity game on n vertices to one on n+2 vertices.  After
  Breaker's opening edge (u,v'), Maker claims (v',w); the remaining edges
  split into E1 (edges avoiding v' and w, where the base strategy builds
  an n-cycle) and E2 (the edges joining the other vertices to v' and w,
  where a small pairing rulebook guarantees the n-cycle can be extended
  through v' and w).
* ``FhpExtensionStrategy`` uses the same machinery to win the fixed-pair
  Hamiltonian path game on n+2 vertices, with the two fixed endpoints
  playing the roles of v' and w.
* ``SparseMakerStrategy`` wins the Hamiltonicity game on the sparse
  "cycle of cliques" host graph by playing one fixed-pair Hamiltonian
  path game per clique block, all in parallel.

All strategies follow the part-mirroring convention: Maker answers in the
part Breaker played in; when that is impossible he claims an arbitrary
free edge elsewhere and books it as a forgettable bonus.  Bonus edges
stay "free" in the part's virtual game (strategies may later re-claim
them at no real cost), so each virtual part game is a legitimate
alternating play in which Maker follows a winning strategy, and Maker's
real edges are a superset of his virtual ones.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .board import (
    BREAKER,
    Board,
    EdgeId,
    FREE,
    MAKER,
    Player,
    edge_index,
    edge_pairs,
    num_edges,
)
from .canon import canonical_form
from .games import GameSpec
from .solver import Engine, SearchConfig, TranspositionTable


class StrategyFailureError(RuntimeError):
    """A strategy could not produce a guaranteed-winning move."""


class NoExtensionError(RuntimeError):
    """Cycle extension preconditions (Situation 1 or 2) do not hold."""


SITUATION1 = "situation1"
SITUATION2 = "situation2"
FAILURE = "failure"


@dataclass(frozen=True)
class E2Outcome:
    situation: str
    witness: int | None = None  # Maker-isolated vertex in Situation 2


# ---------------------------------------------------------------------------
# E2 pairing rules
# ---------------------------------------------------------------------------


class PairLinker:
    """Maker's rulebook on the edges joining side vertices to two specials.

    Tracks, per side vertex x, the states of its two special edges
    (x, s0) and (x, s1).  Maker's move is picked by the first applicable
    rule:

    1. one free vertex left and Maker owns no edge at some special:
       connect them;
    2. some vertex is half isolated by Breaker: claim its other edge;
    3. some vertex is free: claim one of its edges, preferring the
       special with fewer Maker edges;
    4. claim a free edge at a vertex half isolated by Maker, preferring
       the special with fewer Maker edges.

    Arbitrary choices are determinized (lowest special count, then lowest
    special, then lowest vertex), so the chosen move class is a pure
    function of the status vectors, which makes exhaustive checking with
    memoization sound.
    """

    __slots__ = ("s0", "s1", "side", "st0", "st1")

    def __init__(self, side_vertices, s0: int, s1: int):
        self.side = sorted(side_vertices)
        self.s0 = s0
        self.s1 = s1
        self.st0 = {x: FREE for x in self.side}
        self.st1 = {x: FREE for x in self.side}

    def clone(self) -> "PairLinker":
        other = PairLinker.__new__(PairLinker)
        other.side = self.side
        other.s0 = self.s0
        other.s1 = self.s1
        other.st0 = dict(self.st0)
        other.st1 = dict(self.st1)
        return other

    def signature(self) -> tuple:
        return tuple(self.st0[x] for x in self.side) + tuple(
            self.st1[x] for x in self.side
        )

    def record(self, x: int, special: int, p: Player) -> None:
        st = self.st0 if special == self.s0 else self.st1
        if st[x] != FREE:
            raise StrategyFailureError(f"special edge ({x},{special}) already claimed")
        st[x] = p

    def free_moves(self) -> list[tuple[int, int]]:
        out = []
        for x in self.side:
            if self.st0[x] == FREE:
                out.append((x, self.s0))
            if self.st1[x] == FREE:
                out.append((x, self.s1))
        return out

    def has_free(self) -> bool:
        return any(self.st0[x] == FREE or self.st1[x] == FREE for x in self.side)

    def maker_counts(self) -> tuple[int, int]:
        m0 = sum(1 for x in self.side if self.st0[x] == MAKER)
        m1 = sum(1 for x in self.side if self.st1[x] == MAKER)
        return m0, m1

    def choose(self) -> tuple[int, int]:
        """Maker's next special edge by the first applicable rule."""
        st0, st1 = self.st0, self.st1
        m0, m1 = self.maker_counts()
        free_vertices = [x for x in self.side if st0[x] == FREE and st1[x] == FREE]

        # rule 1
        if len(free_vertices) == 1:
            bare = [s for s, m in ((self.s0, m0), (self.s1, m1)) if m == 0]
            if bare:
                return (free_vertices[0], min(bare))

        # rule 2: half isolated by Breaker
        for x in self.side:
            if st0[x] == BREAKER and st1[x] == FREE:
                return (x, self.s1)
            if st1[x] == BREAKER and st0[x] == FREE:
                return (x, self.s0)

        # rule 3: free vertex, prefer the less-connected special
        if free_vertices:
            x = free_vertices[0]
            if m0 <= m1:
                return (x, self.s0)
            return (x, self.s1)

        # rule 4: free edge at a vertex half isolated by Maker
        cands = []
        for x in self.side:
            if st0[x] == MAKER and st1[x] == FREE:
                cands.append((m1, 1, x, self.s1))
            elif st1[x] == MAKER and st0[x] == FREE:
                cands.append((m0, 0, x, self.s0))
        if not cands:
            raise StrategyFailureError("no applicable pairing rule")
        _, _, x, s = min(cands)
        return (x, s)

    def respond_to(self, x: int, special: int) -> tuple[int, int]:
        """Record Breaker's special-edge claim and return Maker's reply."""
        self.record(x, special, BREAKER)
        mx, ms = self.choose()
        self.record(mx, ms, MAKER)
        return (mx, ms)

    def classify(self) -> E2Outcome:
        """Terminal-state classification (all special edges claimed)."""
        st0, st1 = self.st0, self.st1
        iso_breaker = [x for x in self.side if st0[x] == BREAKER and st1[x] == BREAKER]
        iso_maker = [x for x in self.side if st0[x] == MAKER and st1[x] == MAKER]
        m0, m1 = self.maker_counts()
        if len(iso_breaker) <= 1 and m0 >= 1 and m1 >= 1:
            return E2Outcome(SITUATION1)
        if len(iso_breaker) == 2 and len(iso_maker) == 1:
            a = iso_maker[0]
            if m0 - 1 >= 1 and m1 - 1 >= 1:
                return E2Outcome(SITUATION2, witness=a)
        return E2Outcome(FAILURE)

    def labels(self) -> dict[int, frozenset[int]]:
        """Label 0 iff (x, s0) is Maker's; label 1 iff (x, s1) is."""
        out = {}
        for x in self.side:
            s = set()
            if self.st0[x] == MAKER:
                s.add(0)
            if self.st1[x] == MAKER:
                s.add(1)
            out[x] = frozenset(s)
        return out


def e2_respond(linker: PairLinker, x: int, special: int) -> tuple[int, int]:
    """Module-level convenience wrapper around PairLinker.respond_to."""
    return linker.respond_to(x, special)


def exhaustive_e2_check(n_side: int, variant: str = "ham") -> dict[str, int]:
    """Enumerate every Breaker play restricted to the special edges, with
    Maker answering by the pairing rules, and classify all terminal
    states.  Memoized on the exact status vectors (Maker's replies are a
    pure function of them).  Returns counts of distinct terminal states
    per situation; any 'failure' count > 0 disproves the rulebook.
    """
    if variant not in ("ham", "fhp"):
        raise ValueError(variant)
    side = list(range(n_side))
    s0, s1 = n_side, n_side + 1
    root = PairLinker(side, s0, s1)
    if variant == "ham":
        # Breaker's opening edge (u, v') is already on the board
        root.record(0, s0, BREAKER)
    counts = {SITUATION1: 0, SITUATION2: 0, FAILURE: 0}
    seen: set[tuple] = set()
    terminal_seen: set[tuple] = set()
    stack = [root]
    while stack:
        state = stack.pop()
        sig = state.signature()
        if sig in seen:
            continue
        seen.add(sig)
        for (x, s) in state.free_moves():
            child = state.clone()
            child.record(x, s, BREAKER)
            if child.has_free():
                mx, ms = child.choose()
                child.record(mx, ms, MAKER)
            if child.has_free():
                stack.append(child)
            else:
                tsig = child.signature()
                if tsig not in terminal_seen:
                    terminal_seen.add(tsig)
                    counts[child.classify().situation] += 1
    return counts


# ---------------------------------------------------------------------------
# cycle extension and Hamiltonian extraction
# ---------------------------------------------------------------------------


def extend_cycle(
    cycle: list[int],
    labels: dict[int, frozenset[int]],
    v: int,
    w: int,
) -> list[int]:
    """Insert v and w into a cycle between adjacent vertices x, y with
    0 in labels(x) and 1 in labels(y) (so Maker owns (x,v), (v,w), (w,y)).
    Deterministic: smallest insertion index, forward orientation first.
    """
    n = len(cycle)
    for i in range(n):
        x, y = cycle[i], cycle[(i + 1) % n]
        if 0 in labels.get(x, ()) and 1 in labels.get(y, ()):
            return cycle[: i + 1] + [v, w] + cycle[i + 1 :]
        if 0 in labels.get(y, ()) and 1 in labels.get(x, ()):
            return cycle[: i + 1] + [w, v] + cycle[i + 1 :]
    raise NoExtensionError("no adjacent pair labeled {0},{1} on the cycle")


def find_hamiltonian_cycle(adj: list[int], n: int) -> list[int] | None:
    """Some Hamiltonian cycle of the bitmask-adjacency graph, or None."""
    if n < 3:
        return None
    path = [0]

    def rec(visited: int, last: int) -> list[int] | None:
        if len(path) == n:
            return list(path) if adj[last] & 1 else None
        cands = adj[last] & ~visited
        while cands:
            vbit = cands & -cands
            cands ^= vbit
            nxt = vbit.bit_length() - 1
            path.append(nxt)
            got = rec(visited | vbit, nxt)
            if got is not None:
                return got
            path.pop()
        return None

    return rec(1, 0)


def find_hamiltonian_path(adj: list[int], n: int, u: int, v: int) -> list[int] | None:
    """Some Hamiltonian u-v path, or None."""
    path = [u]
    target_bit = 1 << v

    def rec(visited: int, last: int) -> list[int] | None:
        if len(path) == n:
            return list(path) if last == v else None
        cands = adj[last] & ~visited
        if len(path) < n - 1:
            cands &= ~target_bit  # v must come last
        while cands:
            vbit = cands & -cands
            cands ^= vbit
            nxt = vbit.bit_length() - 1
            path.append(nxt)
            got = rec(visited | vbit, nxt)
            if got is not None:
                return got
            path.pop()
        return None

    if u == v:
        return None
    return rec(1 << u, u)


# ---------------------------------------------------------------------------
# part mirroring
# ---------------------------------------------------------------------------


class SolveCache:
    """Shared transposition tables and best-move memos, keyed by spec.

    Entries are exact, so sharing a cache across many games changes speed
    only, never any move or outcome.
    """

    def __init__(self, config: SearchConfig | None = None):
        self.config = config or SearchConfig()
        self.tts: dict[GameSpec, TranspositionTable] = {}
        # canonical key -> winning move in canonical coordinates
        self.moves: dict[bytes, tuple[int, int] | None] = {}

    def tt_for(self, spec: GameSpec) -> TranspositionTable:
        tt = self.tts.get(spec)
        if tt is None:
            tt = self.tts[spec] = TranspositionTable(
                self.config.tt_max_entries, self.config.tt_keep_depth
            )
        return tt


class SolverPart:
    """A sub-game on a vertex subset, played by the exact solver.

    Maker is the second player inside the part.  The part's board holds
    the virtual game only; bonus edges of the enclosing composition are
    invisible here (they stay free until the strategy claims them).
    """

    def __init__(self, spec: GameSpec, vertices: list[int], outer_n: int, cache: SolveCache):
        self.spec = spec
        self.vertices = list(vertices)
        self.outer_n = outer_n
        self.local_of = {g: i for i, g in enumerate(self.vertices)}
        self.cache = cache
        self.engine = Engine(spec, cache.config, cache.tt_for(spec))
        self.to_move: Player = BREAKER

    def owns_edge(self, u: int, v: int) -> bool:
        return u in self.local_of and v in self.local_of

    def _to_local(self, e: EdgeId) -> EdgeId:
        u, v = edge_pairs(self.outer_n)[e]
        return edge_index(self.local_of[u], self.local_of[v], self.spec.n)

    def _to_global(self, e: EdgeId) -> EdgeId:
        u, v = edge_pairs(self.spec.n)[e]
        return edge_index(self.vertices[u], self.vertices[v], self.outer_n)

    def virtual_breaker(self, e: EdgeId) -> None:
        self.engine.do(self._to_local(e), BREAKER)
        self.to_move = MAKER

    def virtual_maker(self, e: EdgeId) -> None:
        self.engine.do(self._to_local(e), MAKER)
        self.to_move = BREAKER

    def virtual_choice(self) -> EdgeId | None:
        board = self.engine.board
        if board.free_count == 0:
            return None
        # memoize winning moves per isomorphism class, in canonical
        # coordinates: a winning move transfers along any isomorphism
        key, perm = canonical_form(board, MAKER, self.spec.fixed_pair, self.spec.kind)
        hit = self.cache.moves.get(key, -1)
        if hit == -1:
            mv = self.engine.best_move(MAKER)
            if mv is None:
                self.cache.moves[key] = None
                raise StrategyFailureError(
                    f"solver part lost a {self.spec.kind} position"
                )
            u, v = edge_pairs(self.spec.n)[mv]
            inv = [0] * self.spec.n
            for i, g in enumerate(perm):
                inv[g] = i
            self.cache.moves[key] = (inv[u], inv[v])
        elif hit is None:
            raise StrategyFailureError(f"solver part lost a {self.spec.kind} position")
        else:
            ci, cj = hit
            mv = edge_index(perm[ci], perm[cj], self.spec.n)
            if board.states[mv] != FREE:
                raise StrategyFailureError("canonical move transfer hit a non-free edge")
        return self._to_global(mv)

    def virtual_free_exists(self) -> bool:
        return self.engine.board.free_count > 0

    def lowest_virtual_free(self) -> EdgeId:
        return self._to_global(self.engine.board.free_edges()[0])

    def maker_virtual_adj(self) -> list[int]:
        """Maker's virtual edges mapped back to global vertex masks."""
        adj = [0] * self.outer_n
        for e in self.engine.board.edges_of(MAKER):
            u, v = edge_pairs(self.spec.n)[e]
            gu, gv = self.vertices[u], self.vertices[v]
            adj[gu] |= 1 << gv
            adj[gv] |= 1 << gu
        return adj


class LinkerPart:
    """Adapter presenting a PairLinker as a mirrored part over real edges."""

    def __init__(self, linker: PairLinker, outer_n: int):
        self.linker = linker
        self.outer_n = outer_n
        self.to_move: Player = BREAKER

    def _split(self, e: EdgeId) -> tuple[int, int]:
        u, v = edge_pairs(self.outer_n)[e]
        if u in (self.linker.s0, self.linker.s1):
            return v, u
        return u, v

    def owns_edge(self, u: int, v: int) -> bool:
        specials = (self.linker.s0, self.linker.s1)
        return (u in specials) != (v in specials)

    def virtual_breaker(self, e: EdgeId) -> None:
        x, s = self._split(e)
        self.linker.record(x, s, BREAKER)
        self.to_move = MAKER

    def virtual_maker(self, e: EdgeId) -> None:
        x, s = self._split(e)
        self.linker.record(x, s, MAKER)
        self.to_move = BREAKER

    def virtual_choice(self) -> EdgeId | None:
        if not self.linker.has_free():
            return None
        x, s = self.linker.choose()
        return edge_index(x, s, self.outer_n)

    def virtual_free_exists(self) -> bool:
        return self.linker.has_free()

    def lowest_virtual_free(self) -> EdgeId:
        moves = [edge_index(x, s, self.outer_n) for (x, s) in self.linker.free_moves()]
        return min(moves)


class ComposedMakerStrategy:
    """Base class: route Breaker's moves to parts, mirror, book bonuses."""

    def __init__(self, n: int, absent_edges: tuple[EdgeId, ...] = ()):
        self.n = n
        self.mirror = Board(n, absent_edges)
        self.parts: list = []
        self.bonus: set[EdgeId] = set()

    # -- to be provided by subclasses --------------------------------------

    def _part_of(self, e: EdgeId):
        u, v = self.mirror.pairs[e]
        for part in self.parts:
            if part.owns_edge(u, v):
                return part
        return None

    def respond(self, breaker_edge: EdgeId) -> EdgeId:
        """Mirror Breaker's real move and return Maker's real reply."""
        self.mirror.do_move(breaker_edge, BREAKER)
        move = self._respond_routed(breaker_edge)
        self.mirror.do_move(move, MAKER)
        return move

    def observe_breaker(self, breaker_edge: EdgeId) -> None:
        """Mirror Breaker's final move of the game (no reply possible)."""
        self.mirror.do_move(breaker_edge, BREAKER)
        part = self._part_of(breaker_edge)
        if part is not None:
            part.virtual_breaker(breaker_edge)

    def _respond_routed(self, breaker_edge: EdgeId) -> EdgeId:
        part = self._part_of(breaker_edge)
        if part is not None:
            part.virtual_breaker(breaker_edge)
            mv = part.virtual_choice()
            if mv is not None:
                part.virtual_maker(mv)
                if mv in self.bonus:
                    self.bonus.discard(mv)  # already really Maker's
                else:
                    return mv
        return self._claim_extra(part)

    def _claim_extra(self, avoided_part) -> EdgeId:
        """Arbitrary really-free edge, preferring the other parts."""
        free = self.mirror.free_edges()
        if not free:
            raise StrategyFailureError("no free edge left for Maker")
        for e in free:
            p = self._part_of(e)
            if p is not None and p is not avoided_part:
                self.bonus.add(e)
                return e
        for e in free:
            if self._part_of(e) is not None:
                self.bonus.add(e)
                return e
        # partless edges (the excluded fixed-pair edge) are a last resort
        # and are provably never needed; guard anyway
        raise StrategyFailureError("only part-less edges remain free")

    def _flush_parts(self) -> None:
        """Complete every virtual game over the remaining bonus edges."""
        if self.mirror.free_count:
            raise StrategyFailureError("flush before the real game is over")
        for part in self.parts:
            while part.virtual_free_exists():
                if part.to_move == BREAKER:
                    part.virtual_breaker(part.lowest_virtual_free())
                else:
                    mv = part.virtual_choice()
                    if mv is None:
                        break
                    part.virtual_maker(mv)

    def maker_adj(self) -> list[int]:
        return list(self.mirror.maker_adj)


class HamExtensionStrategy(ComposedMakerStrategy):
    """Second-player Hamiltonicity strategy on n+2 vertices, composed from
    a solver-backed second-player strategy on n vertices plus the pairing
    rulebook on the two special vertices."""

    def __init__(self, n_total: int, cache: SolveCache | None = None):
        super().__init__(n_total)
        if n_total < 10:
            raise ValueError("extension needs a winning base, so n_total >= 10")
        self.base_n = n_total - 2
        self.cache = cache or SolveCache()
        self.v: int | None = None
        self.w: int | None = None
        self.e1: SolverPart | None = None
        self.e2: LinkerPart | None = None

    def _respond_routed(self, breaker_edge: EdgeId) -> EdgeId:
        if self.v is None:
            return self._setup(breaker_edge)
        return super()._respond_routed(breaker_edge)

    def _setup(self, opening: EdgeId) -> EdgeId:
        u0, v0 = self.mirror.pairs[opening]
        self.v = min(u0, v0)
        u = max(u0, v0)
        self.w = min(x for x in range(self.n) if x not in (u0, v0))
        v1 = [x for x in range(self.n) if x not in (self.v, self.w)]
        self.e1 = SolverPart(GameSpec("ham", self.base_n), v1, self.n, self.cache)
        linker = PairLinker(v1, self.v, self.w)
        linker.record(u, self.v, BREAKER)  # Breaker's opening edge
        self.e2 = LinkerPart(linker, self.n)
        self.parts = [self.e1, self.e2]
        return edge_index(self.v, self.w, self.n)

    def extended_cycle(self) -> list[int]:
        """After the game: Maker's (n+2)-cycle via the extension argument.

        Flushes the virtual games, pulls the n-cycle out of the base
        part's Maker graph, and splices v and w in at a labeled pair.
        """
        self._flush_parts()
        assert self.e1 is not None and self.e2 is not None
        outcome = self.e2.linker.classify()
        if outcome.situation == FAILURE:
            raise NoExtensionError("terminal E2 state is neither situation")
        base_cycle = find_hamiltonian_cycle_on(
            self.e1.maker_virtual_adj(), self.e1.vertices
        )
        if base_cycle is None:
            raise StrategyFailureError("base strategy failed to build its cycle")
        return extend_cycle(base_cycle, self.e2.linker.labels(), self.v, self.w)


class FhpExtensionStrategy(ComposedMakerStrategy):
    """Second-player fixed-pair Hamiltonian path strategy on n+2 vertices.

    The fixed endpoints u, v play the special roles; the edge (u,v) is in
    no winning set, belongs to no part, and is never claimed by Maker.
    """

    def __init__(
        self,
        n_total: int,
        u: int = 0,
        v: int = 1,
        cache: SolveCache | None = None,
    ):
        super().__init__(n_total)
        if n_total < 10:
            raise ValueError("extension needs a winning base, so n_total >= 10")
        self.base_n = n_total - 2
        self.u = u
        self.v = v
        self.cache = cache or SolveCache()
        v1 = [x for x in range(n_total) if x not in (u, v)]
        self.e1 = SolverPart(GameSpec("ham", self.base_n), v1, n_total, self.cache)
        self.e2 = LinkerPart(PairLinker(v1, u, v), n_total)
        self.parts = [self.e1, self.e2]

    def extended_path(self) -> list[int]:
        """After the game: Maker's Hamiltonian u-v path.

        The spliced cycle (..., x, u, v, y, ...) minus the edge (u,v) is
        the u-v path; (u,v) itself was never claimed.
        """
        self._flush_parts()
        outcome = self.e2.linker.classify()
        if outcome.situation == FAILURE:
            raise NoExtensionError("terminal E2 state is neither situation")
        base_cycle = find_hamiltonian_cycle_on(
            self.e1.maker_virtual_adj(), self.e1.vertices
        )
        if base_cycle is None:
            raise StrategyFailureError("base strategy failed to build its cycle")
        cyc = extend_cycle(base_cycle, self.e2.linker.labels(), self.u, self.v)
        i = cyc.index(self.u)
        j = cyc.index(self.v)
        # rotate so the path runs u .. v without the (u,v) chord
        if (i + 1) % len(cyc) == j:
            path = cyc[j:] + cyc[:j]
        else:
            path = cyc[i:] + cyc[:i]
        if path[0] != self.u:
            path.reverse()
        return path


def find_hamiltonian_cycle_on(adj: list[int], vertices: list[int]) -> list[int] | None:
    """Hamiltonian cycle through exactly `vertices` in a global-adjacency
    graph; returns global vertex labels."""
    local_of = {g: i for i, g in enumerate(vertices)}
    n = len(vertices)
    ladj = [0] * n
    for i, g in enumerate(vertices):
        m = adj[g]
        while m:
            vbit = m & -m
            m ^= vbit
            h = vbit.bit_length() - 1
            if h in local_of:
                ladj[i] |= 1 << local_of[h]
    cyc = find_hamiltonian_cycle(ladj, n)
    if cyc is None:
        return None
    return [vertices[i] for i in cyc]


# ---------------------------------------------------------------------------
# sparse host graph ("cycle of cliques")
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseGraphSpec:
    """Sparse host graph: m cliques of 8 or 9 vertices arranged in a
    cycle, consecutive cliques overlapping on one anchor vertex, each
    clique missing exactly its anchor-anchor edge."""

    n: int
    d: int
    m: int
    r: int
    parts: tuple[tuple[int, ...], ...]
    anchors: tuple[int, ...]

    def blocks(self) -> list[tuple[tuple[int, ...], tuple[int, int]]]:
        """(W_i vertex tuple, missing anchor pair) per block."""
        out = []
        for i in range(self.m):
            prev_anchor = self.anchors[(i - 1) % self.m]
            w = (prev_anchor,) + self.parts[i]
            out.append((w, (prev_anchor, self.anchors[i])))
        return out

    def edge_count(self) -> int:
        # sum of per-block clique sizes minus the m missing anchor edges;
        # equals the closed form 27m + 8r whenever r <= m (all parts have
        # 7 or 8 vertices, i.e. the exact construction applies)
        return sum(math.comb(len(p) + 1, 2) - 1 for p in self.parts)

    def present_edges(self) -> list[tuple[int, int]]:
        seen = set()
        for w, missing in self.blocks():
            miss = frozenset(missing)
            for ai, a in enumerate(w):
                for b in w[ai + 1 :]:
                    pair = frozenset((a, b))
                    if pair != miss:
                        seen.add((min(a, b), max(a, b)))
        return sorted(seen)

    def absent_edge_ids(self) -> tuple[EdgeId, ...]:
        present = {edge_index(u, v, self.n) for u, v in self.present_edges()}
        return tuple(e for e in range(num_edges(self.n)) if e not in present)


def build_sparse_graph(n: int) -> SparseGraphSpec:
    """The d=7 cycle-of-cliques construction; edge count 27m + 8r, which
    is at most 4n once n >= 336."""
    if n < 14:
        raise ValueError("construction needs n >= 14 (at least two 8-cliques)")
    d = 7
    m, r = divmod(n, d)
    # r <= m: the exact construction, r parts of d+1 vertices and the rest
    # of d.  r > m (only possible for n < 42): no cycle of 8/9-cliques
    # exists (7a + 8b = n has no solution), so the extra vertices are
    # spread as evenly as possible instead, keeping every clique at size
    # >= 8, which the Hamiltonicity argument still supports
    extra, more = divmod(r, m)
    parts = []
    start = 0
    for i in range(m):
        size = d + extra + (1 if i < more else 0)
        parts.append(tuple(range(start, start + size)))
        start += size
    anchors = tuple(p[0] for p in parts)
    return SparseGraphSpec(n=n, d=d, m=m, r=r, parts=tuple(parts), anchors=anchors)


class SparseMakerStrategy(ComposedMakerStrategy):
    """Second-player Hamiltonicity strategy on the sparse host graph:
    one fixed-pair Hamiltonian path game per block, played in parallel
    by the exact solver (block sizes 8 and 9 are Maker wins as second
    player)."""

    def __init__(self, graph: SparseGraphSpec, cache: SolveCache | None = None):
        super().__init__(graph.n, build_sparse_graph(graph.n).absent_edge_ids())
        self.graph = graph
        self.cache = cache or SolveCache()
        for w, (a_prev, a_i) in graph.blocks():
            verts = sorted(w)
            local_of = {g: i for i, g in enumerate(verts)}
            pair = (local_of[a_prev], local_of[a_i])
            pair = (min(pair), max(pair))
            spec = GameSpec(
                "fhp",
                len(verts),
                fixed_pair=pair,
                absent_edges=(edge_index(pair[0], pair[1], len(verts)),),
            )
            self.parts.append(SolverPart(spec, verts, graph.n, self.cache))

    def _part_of(self, e: EdgeId):
        u, v = self.mirror.pairs[e]
        for part in self.parts:
            if part.owns_edge(u, v):
                # anchor pairs are absent from the board, so every present
                # edge lies in exactly one block
                return part
        return None

    def maker_cycle(self) -> list[int]:
        """After the game: splice the per-block anchor-to-anchor paths."""
        self._flush_parts()
        cycle: list[int] = []
        for part in self.parts:
            u, v = part.spec.fixed_pair  # type: ignore[misc]
            adj = [0] * part.spec.n
            for e in part.engine.board.edges_of(MAKER):
                a, b = edge_pairs(part.spec.n)[e]
                adj[a] |= 1 << b
                adj[b] |= 1 << a
            path = find_hamiltonian_path(adj, part.spec.n, u, v)
            if path is None:
                raise StrategyFailureError("block failed to build its path")
            gpath = [part.vertices[i] for i in path]
            # orient each path to continue the walk around the anchor cycle
            if cycle and gpath[0] != cycle[-1]:
                gpath.reverse()
            if cycle:
                assert gpath[0] == cycle[-1]
                cycle.extend(gpath[1:])
            else:
                cycle.extend(gpath)
        assert cycle[0] == cycle[-1]
        return cycle[:-1]


# ---------------------------------------------------------------------------
# adversaries and the simulation harness
# ---------------------------------------------------------------------------


class RandomBreaker:
    """Uniform random claims over the free edges (seeded)."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def choose(self, board: Board) -> EdgeId:
        return self.rng.choice(board.free_edges())


class GreedyBreaker:
    """Maximizes Breaker's edge degree ed_B, ties by lowest edge id."""

    def __init__(self, rng: random.Random | None = None):
        pass

    def choose(self, board: Board) -> EdgeId:
        best, best_key = None, None
        for e in board.free_edges():
            key = -board.edge_degree(e, BREAKER)
            if best is None or key < best_key:
                best, best_key = e, key
        return best


@dataclass
class GameRecord:
    maker_won: bool
    moves: list[tuple[EdgeId, Player]]
    certificate: list[int] | None


def play_strategy_game(strategy: ComposedMakerStrategy, adversary, *, certify) -> GameRecord:
    """Breaker (the adversary) moves first; the strategy answers until the
    board is full.  `certify` maps Maker's adjacency to a witness
    structure or None."""
    board = Board(strategy.n, [e for e in range(strategy.mirror.E) if strategy.mirror.states[e] == 3])
    moves: list[tuple[EdgeId, Player]] = []
    while board.free_count:
        e = adversary.choose(board)
        board.do_move(e, BREAKER)
        moves.append((e, BREAKER))
        if board.free_count == 0:
            strategy.observe_breaker(e)
            break
        m = strategy.respond(e)
        board.do_move(m, MAKER)
        moves.append((m, MAKER))
    cert = certify(board.maker_adj)
    return GameRecord(cert is not None, moves, cert)


def _is_cycle_of(cert: list[int], adj: list[int], n: int) -> bool:
    if cert is None or len(cert) != n or len(set(cert)) != n:
        return False
    return all(adj[cert[i]] >> cert[(i + 1) % n] & 1 for i in range(n))


def certify_ham_cycle(n: int):
    def check(adj: list[int]) -> list[int] | None:
        return find_hamiltonian_cycle(adj, n)

    return check


def certify_fixed_path(n: int, u: int, v: int):
    def check(adj: list[int]) -> list[int] | None:
        return find_hamiltonian_path(adj, n, u, v)

    return check
