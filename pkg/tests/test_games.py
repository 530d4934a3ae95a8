"""Winning-set generation and incremental family maintenance."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from makerbreaker.board import BREAKER, Board, MAKER, edge_index, num_edges
from makerbreaker.games import (
    GameSpec,
    InconsistentFamilyError,
    UnsupportedKindError,
    generate_winning_sets,
    make_family,
    player_wins,
)


# -- generation ------------------------------------------------------------


def test_ham_set_count_and_shape():
    for n in (4, 5, 6):
        fam = generate_winning_sets(GameSpec("ham", n))
        assert len(fam) == math.factorial(n - 1) // 2
        assert all(len(s) == n for s in fam.sets)
        assert len(set(map(frozenset, fam.sets))) == len(fam)


def test_hp_set_count_and_shape():
    for n in (4, 5):
        fam = generate_winning_sets(GameSpec("hp", n))
        assert len(fam) == math.factorial(n) // 2
        assert all(len(s) == n - 1 for s in fam.sets)


def test_fhp_set_count_and_pair_edge_exclusion():
    for n in (4, 5, 6):
        fam = generate_winning_sets(GameSpec("fhp", n, (0, 1)))
        assert len(fam) == math.factorial(n - 2)
        pair_edge = edge_index(0, 1, n)
        assert all(pair_edge not in s for s in fam.sets)
        assert all(len(s) == n - 1 for s in fam.sets)


def test_absent_edges_drop_touching_sets():
    full = generate_winning_sets(GameSpec("ham", 5))
    cut = generate_winning_sets(GameSpec("ham", 5, absent_edges=(0,)))
    assert len(cut) == sum(1 for s in full.sets if 0 not in s)


def test_structural_kinds_refuse_enumeration():
    with pytest.raises(UnsupportedKindError):
        generate_winning_sets(GameSpec("conn", 5))
    assert make_family(GameSpec("conn", 5)) is None
    assert make_family(GameSpec("pm", 4)) is None


def test_spec_validation():
    with pytest.raises(ValueError):
        GameSpec("ham", 3)
    with pytest.raises(ValueError):
        GameSpec("fhp", 5)  # missing pair
    with pytest.raises(ValueError):
        GameSpec("ham", 5, fixed_pair=(0, 1))
    with pytest.raises(ValueError):
        GameSpec("pm", 5)  # odd n
    with pytest.raises(ValueError):
        GameSpec("nosuch", 5)


def test_make_family_copies_are_independent():
    a = make_family(GameSpec("ham", 5))
    b = make_family(GameSpec("ham", 5))
    a.apply(0, BREAKER)
    assert b.alive_count == len(b)
    assert a.alive_count < len(a)


# -- incremental maintenance ------------------------------------------------


def brute_state(fam, moves):
    """Recompute (cnt, alive) for a move sequence from scratch."""
    maker = {e for e, p in moves if p == MAKER}
    breaker = {e for e, p in moves if p == BREAKER}
    cnt = [len(set(s) & maker) for s in fam.sets]
    alive = [not (set(s) & breaker) for s in fam.sets]
    return cnt, alive


@given(st.integers(4, 6), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_apply_matches_scratch_recomputation(n, rng):
    spec = GameSpec("ham", n)
    fam = make_family(spec)
    board = Board(n)
    moves = []
    edges = board.free_edges()
    rng.shuffle(edges)
    p = MAKER
    for e in edges[: rng.randint(1, board.E)]:
        fam.apply(e, p)
        moves.append((e, p))
        p = MAKER + BREAKER - p
    cnt, alive = brute_state(fam, moves)
    assert list(fam.cnt) == cnt
    assert list(fam.alive) == alive
    assert fam.alive_count == sum(alive)
    assert fam.n_complete == sum(
        1 for c, a, s in zip(cnt, alive, fam.sets) if a and c == len(s)
    )


@given(st.integers(4, 6), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_undo_restores_and_replay_agrees(n, rng):
    spec = GameSpec("hp", n)
    fam = make_family(spec)
    board = Board(n)
    edges = board.free_edges()
    rng.shuffle(edges)
    p = MAKER
    stack = []
    for e in edges[: rng.randint(1, board.E)]:
        board.do_move(e, p)
        fam.apply(e, p)
        stack.append((e, p))
        p = MAKER + BREAKER - p
    assert fam.replay_equal(board)
    snap = fam.snapshot()
    k = rng.randint(1, len(stack))
    undone = []
    for _ in range(k):
        e, q = stack.pop()
        fam.undo(e, q)
        board.revert_move(e, q)
        undone.append((e, q))
    for e, q in reversed(undone):
        board.do_move(e, q)
        fam.apply(e, q)
    redo = fam.snapshot()
    assert np.array_equal(snap[0], redo[0])
    assert np.array_equal(snap[1], redo[1])
    assert snap[2:] == redo[2:]
    assert fam.replay_equal(board)


def test_histogram_tracks_min_deficit():
    rng = random.Random(11)
    fam = make_family(GameSpec("ham", 5))
    board = Board(5)
    p = MAKER
    for e in rng.sample(range(board.E), 7):
        board.do_move(e, p)
        fam.apply(e, p)
        alive_deficits = [
            int(fam.need[s] - fam.cnt[s]) for s in range(len(fam)) if fam.alive[s]
        ]
        expected = min(alive_deficits) if alive_deficits else 1 << 14
        assert fam.min_alive_deficit() == expected
        assert fam.deficit_one_count() == sum(1 for d in alive_deficits if d == 1)
        p = MAKER + BREAKER - p


def test_edge_alive_cnt_tracks_membership():
    rng = random.Random(13)
    fam = make_family(GameSpec("ham", 6))
    for e in rng.sample(range(15), 6):
        fam.apply(e, BREAKER if rng.random() < 0.5 else MAKER)
    for e in range(15):
        expected = sum(1 for s in range(len(fam)) if fam.alive[s] and e in fam.sets[s])
        assert fam.edge_alive_cnt[e] == expected


def test_threat_edges_are_free_completions():
    fam = make_family(GameSpec("ham", 4))
    board = Board(4)
    # claim a triangle path for Maker: 0-1, 1-2, 2-3
    for u, v in ((0, 1), (1, 2), (2, 3)):
        e = edge_index(u, v, 4)
        board.do_move(e, MAKER)
        fam.apply(e, MAKER)
    threats = fam.threat_edges(board, limit=4)
    # the unique cycle through those edges closes with (0,3)
    assert threats == [edge_index(0, 3, 4)]


def test_undo_out_of_order_raises():
    fam = make_family(GameSpec("ham", 4))
    fam.apply(0, MAKER)
    with pytest.raises(InconsistentFamilyError):
        fam.undo(1, MAKER)
    fam.undo(0, MAKER)
    with pytest.raises(InconsistentFamilyError):
        fam.undo(0, MAKER)


def test_pristine_copy_refuses_mutated_family():
    fam = make_family(GameSpec("ham", 4))
    fam.apply(0, MAKER)
    with pytest.raises(InconsistentFamilyError):
        fam.pristine_copy()


# -- structural winner checks ------------------------------------------------


def test_conn_winner_checks():
    spec = GameSpec("conn", 4)
    board = Board(4)
    # Maker claims a spanning star at 0
    for v in (1, 2, 3):
        board.do_move(edge_index(0, v, 4), MAKER)
    assert player_wins(board, None, spec, MAKER)
    board2 = Board(4)
    # Breaker isolates vertex 0 entirely
    for v in (1, 2, 3):
        board2.do_move(edge_index(0, v, 4), BREAKER)
    assert player_wins(board2, None, spec, BREAKER)
    assert not player_wins(board2, None, spec, MAKER)


def test_pm_winner_checks():
    spec = GameSpec("pm", 4)
    board = Board(4)
    board.do_move(edge_index(0, 1, 4), MAKER)
    assert not player_wins(board, None, spec, MAKER)
    board.do_move(edge_index(2, 3, 4), MAKER)
    assert player_wins(board, None, spec, MAKER)
    board2 = Board(4)
    for v in (1, 2, 3):
        board2.do_move(edge_index(0, v, 4), BREAKER)
    assert player_wins(board2, None, spec, BREAKER)


def test_enumerative_winner_checks():
    spec = GameSpec("ham", 4)
    fam = make_family(spec)
    board = Board(4)
    cycle = [(0, 1), (1, 2), (2, 3), (0, 3)]
    for u, v in cycle:
        e = edge_index(u, v, 4)
        board.do_move(e, MAKER)
        fam.apply(e, MAKER)
    assert player_wins(board, fam, spec, MAKER)
    assert not player_wins(board, fam, spec, BREAKER)
