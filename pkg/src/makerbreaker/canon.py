"""Canonical keys for positions viewed as edge-3-colored graphs.

A position is abstracted to three symmetric adjacency layers over the
vertex set (Maker edges, Breaker edges, absent host edges); free edges
are the complement.  Two positions get the same key exactly when a
color-preserving vertex bijection maps one onto the other.  An optional
distinguished vertex pair (for the fixed-pair game) restricts the
bijections to those mapping the pair onto the pair setwise; this is
realized by seeding the initial partition with the pair as its own cell.

The key is computed with an individualization-refinement search in the
style of McKay: refine to the coarsest equitable partition (degree
vectors are triples, one count per layer per cell), individualize a
vertex from the first largest non-singleton cell, recurse, and keep the
lexicographically smallest relabeled adjacency encoding over all leaves.
Automorphisms discovered from equal-certificate leaves prune sibling
branches, which keeps highly symmetric positions (e.g. the empty board)
cheap.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .board import Board, MAKER, Player

try:
    from . import canon_fast as _fast

    _HAVE_FAST = _fast.HAVE_NUMBA
except ImportError:  # pragma: no cover
    _HAVE_FAST = False

__all__ = [
    "ColoringView",
    "view_from_board",
    "refine",
    "canonical_form",
    "canonical_key",
    "count_classes",
]


class ColoringView:
    """Immutable adjacency-bitmask view of a board's edge coloring."""

    __slots__ = ("n", "maker_adj", "breaker_adj", "absent_adj")

    def __init__(
        self,
        n: int,
        maker_adj: Sequence[int],
        breaker_adj: Sequence[int],
        absent_adj: Sequence[int] | None = None,
    ):
        self.n = n
        self.maker_adj = tuple(maker_adj)
        self.breaker_adj = tuple(breaker_adj)
        self.absent_adj = tuple(absent_adj) if absent_adj is not None else (0,) * n


def view_from_board(board: Board) -> ColoringView:
    return ColoringView(board.n, board.maker_adj, board.breaker_adj, board.absent_adj)


def refine(view: ColoringView, cells: Sequence[int]) -> list[int]:
    """Coarsest equitable refinement of an ordered partition.

    Cells are vertex bitmasks; the result is again an ordered list of
    bitmask cells.  A cell splits when its vertices disagree on the
    triple (maker-degree, breaker-degree, absent-degree) towards some
    cell; subcells are emitted in ascending key order, making the result
    deterministic for a given input order.
    """
    cells = list(cells)
    _refine_inplace(view, cells, list(cells))
    return cells


def _refine_inplace(view: ColoringView, cells: list[int], queue: list[int]) -> None:
    """Worklist refinement; `queue` holds the splitter cells to process.

    Every newly created subcell is pushed, so processing stale (already
    split) splitters is harmless: uniformity towards the parts implies
    uniformity towards their union.
    """
    madj = view.maker_adj
    badj = view.breaker_adj
    aadj = view.absent_adj
    use_absent = any(aadj)
    qi = 0
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        i = 0
        while i < len(cells):
            cell = cells[i]
            if cell & (cell - 1) == 0:  # singleton
                i += 1
                continue
            groups: dict = {}
            c = cell
            while c:
                vbit = c & -c
                v = vbit.bit_length() - 1
                if use_absent:
                    key = (
                        (madj[v] & s).bit_count(),
                        (badj[v] & s).bit_count(),
                        (aadj[v] & s).bit_count(),
                    )
                else:
                    key = ((madj[v] & s).bit_count(), (badj[v] & s).bit_count())
                g = groups.get(key)
                groups[key] = vbit if g is None else g | vbit
                c ^= vbit
            if len(groups) > 1:
                parts = [groups[k] for k in sorted(groups)]
                cells[i : i + 1] = parts
                queue.extend(parts)
                i += len(parts)
            else:
                i += 1


def _certificate(view: ColoringView, perm: Sequence[int]) -> int:
    """Relabeled adjacency encoding, 2 bits per vertex pair.

    perm[i] is the original vertex placed at canonical position i.
    Pair codes: 0 free, 1 Maker, 2 Breaker, 3 absent.
    """
    madj = view.maker_adj
    badj = view.breaker_adj
    aadj = view.absent_adj
    n = view.n
    cert = 0
    for i in range(n):
        u = perm[i]
        mu, bu, au = madj[u], badj[u], aadj[u]
        for j in range(i + 1, n):
            vbit = 1 << perm[j]
            if mu & vbit:
                code = 1
            elif bu & vbit:
                code = 2
            elif au & vbit:
                code = 3
            else:
                code = 0
            cert = (cert << 2) | code
    return cert


def _cells_to_perm(cells: Sequence[int]) -> list[int]:
    return [c.bit_length() - 1 for c in cells]


class _CanonSearch:
    __slots__ = ("view", "best_cert", "best_perm", "auts")

    def __init__(self, view: ColoringView):
        self.view = view
        self.best_cert: int | None = None
        self.best_perm: list[int] | None = None
        self.auts: list[list[int]] = []

    def run(self, cells: Sequence[int]) -> int:
        self._descend(refine(self.view, cells), ())
        assert self.best_cert is not None
        return self.best_cert

    def _descend(self, cells: list[int], fixed: tuple[int, ...]) -> None:
        # target cell: first largest non-singleton
        target = -1
        size = 1
        for i, cell in enumerate(cells):
            s = cell.bit_count()
            if s > size:
                target, size = i, s
        if target < 0:
            perm = _cells_to_perm(cells)
            cert = _certificate(self.view, perm)
            if self.best_cert is None or cert < self.best_cert:
                self.best_cert = cert
                self.best_perm = perm
            elif cert == self.best_cert:
                # perm and best_perm label the same canonical graph: their
                # composition is an automorphism of the input coloring.
                g = [0] * self.view.n
                bp = self.best_perm
                for i, v in enumerate(perm):
                    g[bp[i]] = v
                self.auts.append(g)
            return
        cell = cells[target]
        verts = []
        c = cell
        while c:
            vbit = c & -c
            verts.append(vbit.bit_length() - 1)
            c ^= vbit
        tried: list[int] = []
        for v in verts:
            if tried and self._in_orbit(v, tried, fixed):
                continue
            child = list(cells)
            parts = [1 << v, cell & ~(1 << v)]
            child[target : target + 1] = parts
            # parent partition is already equitable: only the fresh split
            # needs propagating
            _refine_inplace(self.view, child, list(parts))
            self._descend(child, fixed + (v,))
            tried.append(v)

    def _in_orbit(self, v: int, tried: list[int], fixed: tuple[int, ...]) -> bool:
        """Is v reachable from an already-tried vertex by a known
        automorphism fixing the individualized prefix pointwise?"""
        stab = [g for g in self.auts if all(g[x] == x for x in fixed)]
        if not stab:
            return False
        cov = set(tried)
        frontier = list(cov)
        while frontier:
            x = frontier.pop()
            for g in stab:
                y = g[x]
                if y not in cov:
                    if y == v:
                        return True
                    cov.add(y)
                    frontier.append(y)
        return v in cov


_KIND_TAGS = {
    None: 0,
    "ham": 1,
    "hp": 2,
    "fhp": 3,
    "conn": 4,
    "pm": 5,
}


def canonical_form(
    board_or_view: Board | ColoringView,
    to_move: Player,
    fixed_pair: tuple[int, int] | None = None,
    game_kind: str | None = None,
) -> tuple[bytes, list[int]]:
    """Canonical key plus the witnessing labeling.

    The key is an order-independent fingerprint of the position's
    isomorphism (sub)class, tagged with the player to move and the game
    kind.  perm[i] is the original vertex at canonical position i, so a
    move stored against the key in canonical coordinates transfers to any
    isomorphic position via its own perm.
    """
    n = board_or_view.n
    full = (1 << n) - 1
    if fixed_pair is not None:
        u, v = fixed_pair
        if u == v or not (0 <= u < n) or not (0 <= v < n):
            raise ValueError(f"invalid fixed pair {fixed_pair}")
        pair_mask = (1 << u) | (1 << v)
        base = [pair_mask, full & ~pair_mask]
        if base[1] == 0:
            base = base[:1]
    else:
        base = [full]
    nbytes = (n * (n - 1) // 2 * 2 + 7) // 8
    if _HAVE_FAST and n <= _fast.MAX_N:
        # the fast path only reads n/maker_adj/breaker_adj/absent_adj, which
        # boards and views share, so no intermediate view is built
        cert_bytes, perm = _fast.canonical_cert_and_perm(board_or_view, base)
    else:
        view = (
            view_from_board(board_or_view)
            if isinstance(board_or_view, Board)
            else board_or_view
        )
        search = _CanonSearch(view)
        cert_bytes = search.run(base).to_bytes(nbytes, "big")
        perm = list(search.best_perm)  # type: ignore[arg-type]
    tag = _KIND_TAGS.get(game_kind, 0)
    key = cert_bytes + bytes([to_move == MAKER, tag, 1 if fixed_pair else 0])
    return key, perm


def canonical_key(
    board_or_view: Board | ColoringView,
    to_move: Player,
    fixed_pair: tuple[int, int] | None = None,
    game_kind: str | None = None,
) -> bytes:
    """Order-independent fingerprint of the position's isomorphism
    (sub)class, tagged with the player to move and the game kind."""
    return canonical_form(board_or_view, to_move, fixed_pair, game_kind)[0]


class CanonKeyer:
    """Repeated-key helper for one (n, fixed_pair, game_kind) context.

    Produces exactly the bytes of ``canonical_key`` but hoists everything
    that does not depend on the position (seed partition, buffer
    allocation, byte-layout constants) out of the per-call path; the
    transposition table calls this once per probed node."""

    __slots__ = ("n", "fixed_pair", "_tag_f", "_tag_m", "_fast", "_bufs",
                 "_seed", "_nbytes", "_pad", "_kind")

    def __init__(self, n: int, fixed_pair: tuple[int, int] | None,
                 game_kind: str | None):
        self.n = n
        self.fixed_pair = fixed_pair
        self._kind = game_kind
        tag = _KIND_TAGS.get(game_kind, 0)
        fixed_flag = 1 if fixed_pair else 0
        self._tag_m = bytes([1, tag, fixed_flag])
        self._tag_f = bytes([0, tag, fixed_flag])
        self._fast = _HAVE_FAST and n <= _fast.MAX_N
        if self._fast:
            import numpy as np

            full = (1 << n) - 1
            if fixed_pair is not None:
                u, v = fixed_pair
                if u == v or not (0 <= u < n) or not (0 <= v < n):
                    raise ValueError(f"invalid fixed pair {fixed_pair}")
                pair_mask = (1 << u) | (1 << v)
                base = [pair_mask, full & ~pair_mask]
                if base[1] == 0:
                    base = base[:1]
            else:
                base = [full]
            self._seed = np.array(base, dtype=np.int64)
            self._bufs = tuple(np.zeros(n, dtype=np.int64) for _ in range(3))
            nbits = n * (n - 1) // 2 * 2
            self._nbytes = (nbits + 7) // 8
            self._pad = self._nbytes * 8 - nbits

    def __call__(self, board: Board, to_move: Player) -> bytes:
        if not self._fast:
            return canonical_key(board, to_move, self.fixed_pair, self._kind)
        madj, badj, aadj = self._bufs
        bm, bb, ba = board.maker_adj, board.breaker_adj, board.absent_adj
        use_absent = False
        for i in range(self.n):
            madj[i] = bm[i]
            badj[i] = bb[i]
            a = ba[i]
            aadj[i] = a
            if a:
                use_absent = True
        out, _perm = _fast._canon_entry(
            madj, badj, aadj, use_absent, self._seed, len(self._seed),
            self.n, self._nbytes, self._pad,
        )
        return out.tobytes() + (self._tag_m if to_move == MAKER else self._tag_f)


def reference_cert_bytes(view: ColoringView, seed_cells: Sequence[int]) -> bytes:
    """Certificate via the pure-Python search only (oracle for the numba
    fast path, which must produce identical bytes)."""
    nbytes = (view.n * (view.n - 1) // 2 * 2 + 7) // 8
    return _CanonSearch(view).run(list(seed_cells)).to_bytes(nbytes, "big")


def pre_key(board: Board, to_move: Player) -> tuple:
    """Cheap permutation-invariant filter key (sorted degree pairs).

    Equal canonical keys imply equal pre-keys, so a missing pre-key is a
    certain transposition-table miss; the converse does not hold.
    """
    return (
        tuple(sorted(zip(board.maker_deg, board.breaker_deg))),
        to_move,
    )


def count_classes(views: Iterable[ColoringView | Board], to_move: Player = MAKER) -> int:
    """Number of distinct isomorphism classes over the sample."""
    return len({canonical_key(v, to_move) for v in views})
