"""Edge-3-colored game board with O(1) move application/undo.

A position of a Maker-Breaker game on the edges of a graph is a complete
graph K_n whose edges each carry one of three states: free, claimed by
Maker, or claimed by Breaker.  Host graphs that are not complete are
represented by permanently marking the missing edges with a fourth
sentinel state ``ABSENT``; absent edges never appear among the free edges.

Edge indexing is row-major upper-triangular: for ``u < v``,

    edge_index(u, v, n) = u*n - u*(u+1)//2 + (v - u - 1)

so (0,1) -> 0, (0,2) -> 1, ..., (n-2,n-1) -> E-1.  This ordering is part
of the on-disk edge-list format and must not change.
"""

from __future__ import annotations

from typing import Iterable, Iterator

FREE = 0
MAKER = 1
BREAKER = 2
ABSENT = 3

Player = int  # MAKER or BREAKER
EdgeId = int

_STATE_CHARS = {FREE: "F", MAKER: "M", BREAKER: "B"}
_CHAR_STATES = {c: s for s, c in _STATE_CHARS.items()}


class IllegalMoveError(Exception):
    """Claiming a non-free edge, or reverting moves out of order."""


def other_player(p: Player) -> Player:
    return MAKER + BREAKER - p


def player_name(p: Player) -> str:
    return "Maker" if p == MAKER else "Breaker"


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int, n: int) -> EdgeId:
    """Triangular index of the unordered pair {u, v} in K_n."""
    if u == v or not (0 <= u < n) or not (0 <= v < n):
        raise ValueError(f"invalid vertex pair ({u}, {v}) for n={n}")
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def _make_pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


_PAIRS_CACHE: dict[int, list[tuple[int, int]]] = {}


def edge_pairs(n: int) -> list[tuple[int, int]]:
    """All vertex pairs of K_n in edge-index order (cached)."""
    pairs = _PAIRS_CACHE.get(n)
    if pairs is None:
        pairs = _PAIRS_CACHE[n] = _make_pairs(n)
    return pairs


class Board:
    """Mutable edge-3-colored position on K_n (minus optional absent edges).

    Single-owner: never share a board between concurrent searches.
    Incremental bookkeeping kept in sync by do_move/revert_move:
    per-player vertex degrees, adjacency bitmasks and the free-edge count.
    """

    __slots__ = (
        "n",
        "E",
        "states",
        "maker_deg",
        "breaker_deg",
        "free_count",
        "history",
        "maker_adj",
        "breaker_adj",
        "absent_adj",
        "pairs",
    )

    def __init__(self, n: int, absent_edges: Iterable[EdgeId] = ()):
        if n < 2:
            raise ValueError("board needs at least 2 vertices")
        self.n = n
        self.E = num_edges(n)
        self.pairs = edge_pairs(n)
        self.states = [FREE] * self.E
        self.maker_deg = [0] * n
        self.breaker_deg = [0] * n
        self.maker_adj = [0] * n
        self.breaker_adj = [0] * n
        self.absent_adj = [0] * n
        self.free_count = self.E
        self.history: list[tuple[EdgeId, Player]] = []
        for e in absent_edges:
            if self.states[e] == ABSENT:
                continue
            u, v = self.pairs[e]
            self.states[e] = ABSENT
            self.absent_adj[u] |= 1 << v
            self.absent_adj[v] |= 1 << u
            self.free_count -= 1

    def do_move(self, e: EdgeId, p: Player) -> None:
        if self.states[e] != FREE:
            raise IllegalMoveError(f"edge {e} is not free")
        self.states[e] = p
        u, v = self.pairs[e]
        if p == MAKER:
            self.maker_deg[u] += 1
            self.maker_deg[v] += 1
            self.maker_adj[u] |= 1 << v
            self.maker_adj[v] |= 1 << u
        else:
            self.breaker_deg[u] += 1
            self.breaker_deg[v] += 1
            self.breaker_adj[u] |= 1 << v
            self.breaker_adj[v] |= 1 << u
        self.free_count -= 1
        self.history.append((e, p))

    def revert_move(self, e: EdgeId, p: Player) -> None:
        if not self.history or self.history[-1] != (e, p):
            raise IllegalMoveError(f"({e}, {p}) is not the last move")
        self.history.pop()
        self.states[e] = FREE
        u, v = self.pairs[e]
        if p == MAKER:
            self.maker_deg[u] -= 1
            self.maker_deg[v] -= 1
            self.maker_adj[u] &= ~(1 << v)
            self.maker_adj[v] &= ~(1 << u)
        else:
            self.breaker_deg[u] -= 1
            self.breaker_deg[v] -= 1
            self.breaker_adj[u] &= ~(1 << v)
            self.breaker_adj[v] &= ~(1 << u)
        self.free_count += 1

    def edge_degree(self, e: EdgeId, p: Player) -> int:
        """ed_p(e) = d_p(u) + d_p(v) for e = {u, v}."""
        u, v = self.pairs[e]
        deg = self.maker_deg if p == MAKER else self.breaker_deg
        return deg[u] + deg[v]

    def free_edges(self) -> list[EdgeId]:
        states = self.states
        return [e for e in range(self.E) if states[e] == FREE]

    def iter_edges(self, state: int) -> Iterator[EdgeId]:
        for e in range(self.E):
            if self.states[e] == state:
                yield e

    def edges_of(self, p: Player) -> list[EdgeId]:
        return [e for e in range(self.E) if self.states[e] == p]

    def present_edges(self) -> list[EdgeId]:
        return [e for e in range(self.E) if self.states[e] != ABSENT]

    def copy_empty(self) -> "Board":
        return Board(self.n, [e for e in range(self.E) if self.states[e] == ABSENT])

    def position_key(self) -> bytes:
        """Raw (labeling-dependent) fingerprint of the current coloring."""
        return bytes(self.states)


def format_board(board: Board) -> str:
    """Edge-list text format: header ``n E`` then ``u v state`` lines.

    Only present (non-absent) edges are listed; edges of K_n missing from
    the list are reconstructed as absent on import.
    """
    lines = []
    present = board.present_edges()
    lines.append(f"{board.n} {len(present)}")
    for e in present:
        u, v = board.pairs[e]
        lines.append(f"{u} {v} {_STATE_CHARS[board.states[e]]}")
    return "\n".join(lines) + "\n"


def parse_board(text: str) -> Board:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("edge-list file must start with 'n E'")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(rows) - 1}")
    listed: dict[EdgeId, int] = {}
    for u_s, v_s, st in rows[1:]:
        u, v = int(u_s), int(v_s)
        e = edge_index(u, v, n)
        if e in listed:
            raise ValueError(f"duplicate edge ({u}, {v})")
        if st not in _CHAR_STATES:
            raise ValueError(f"bad edge state {st!r}")
        listed[e] = _CHAR_STATES[st]
    absent = [e for e in range(num_edges(n)) if e not in listed]
    board = Board(n, absent)
    for e, st in listed.items():
        if st != FREE:
            board.do_move(e, st)
    return board
