"""Exact search: oracle agreement, config independence, TT behavior."""

from itertools import product

import pytest

from makerbreaker.board import BREAKER, MAKER, other_player
from makerbreaker.games import GameSpec
from makerbreaker.solver import (
    BudgetExceededError,
    Engine,
    IllegalStateError,
    NAIVE_EDGE_LIMIT,
    SearchConfig,
    SolveOutcome,
    TranspositionTable,
    best_move,
    naive_solve,
    solve,
)

SMALL_SPECS = [
    GameSpec("ham", 4),
    GameSpec("ham", 5),
    GameSpec("hp", 4),
    GameSpec("hp", 5),
    GameSpec("fhp", 4, (0, 1)),
    GameSpec("fhp", 5, (0, 1)),
    GameSpec("fhp", 5, (1, 3)),
    GameSpec("conn", 4),
    GameSpec("pm", 4),
]


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=str)
@pytest.mark.parametrize("first", (MAKER, BREAKER), ids=("maker", "breaker"))
def test_solve_matches_naive_oracle(spec, first):
    assert solve(spec, first).winner == naive_solve(spec, first)


@pytest.mark.parametrize("spec", [GameSpec("ham", 5), GameSpec("fhp", 5, (0, 1))], ids=str)
def test_winner_independent_of_ordering_tt_and_cutoffs(spec):
    for first in (MAKER, BREAKER):
        winners = set()
        for ordering, tt, cutoffs in product((True, False), repeat=3):
            cfg = SearchConfig(ordering=ordering, tt=tt, cutoffs=cutoffs)
            winners.add(solve(spec, first, cfg).winner)
        assert len(winners) == 1


@pytest.mark.parametrize(
    "spec",
    [GameSpec("ham", 5), GameSpec("hp", 5), GameSpec("fhp", 5, (0, 1))],
    ids=str,
)
def test_compiled_no_tt_search_replays_python_engine(spec):
    """The compiled no-TT search must visit the identical node sequence
    as Engine.play, not merely reach the same winner."""
    from makerbreaker.solver import _solve_enum_no_tt

    for first in (MAKER, BREAKER):
        for ordering, cutoffs in product((True, False), repeat=2):
            cfg = SearchConfig(ordering=ordering, tt=False, cutoffs=cutoffs)
            kernel_engine = Engine(spec, cfg)
            kernel_winner = _solve_enum_no_tt(kernel_engine, first)
            if kernel_winner is None:
                pytest.skip("compiled search unavailable")
            python_engine = Engine(spec, cfg)
            assert kernel_winner == python_engine.play(first)
            assert kernel_engine.nodes == python_engine.nodes


@pytest.mark.parametrize(
    "spec",
    [GameSpec("ham", 5), GameSpec("hp", 5), GameSpec("fhp", 5, (0, 1))],
    ids=str,
)
def test_compiled_tt_search_replays_python_engine(spec):
    """The compiled TT search must probe and store at the same nodes as
    Engine.play: equal winner and equal node count in every config."""
    from makerbreaker.solver import _solve_enum_tt

    for first in (MAKER, BREAKER):
        for ordering, cutoffs in product((True, False), repeat=2):
            cfg = SearchConfig(ordering=ordering, tt=True, cutoffs=cutoffs)
            kernel_engine = Engine(spec, cfg)
            kernel_winner = _solve_enum_tt(kernel_engine, first)
            if kernel_winner is None:
                pytest.skip("compiled search unavailable")
            python_engine = Engine(spec, cfg)
            assert kernel_winner == python_engine.play(first)
            assert kernel_engine.nodes == python_engine.nodes
        # a tiny table forces overflow, exercising depth-filtered eviction
        cfg = SearchConfig(tt=True, tt_max_entries=64, tt_keep_depth=3)
        kernel_engine = Engine(spec, cfg)
        kernel_winner = _solve_enum_tt(kernel_engine, first)
        python_engine = Engine(spec, cfg)
        assert kernel_winner == python_engine.play(first)
        assert kernel_engine.nodes == python_engine.nodes


def test_naive_refuses_large_boards():
    with pytest.raises(ValueError):
        naive_solve(GameSpec("ham", 7), MAKER)
    assert GameSpec("ham", 6).num_free_edges == NAIVE_EDGE_LIMIT  # boundary in range


def test_solve_outcome_fields():
    out = solve(GameSpec("ham", 4), MAKER)
    assert isinstance(out, SolveOutcome)
    assert out.winner == BREAKER
    assert out.winner_name == "Breaker"
    assert out.nodes_visited > 0
    assert out.elapsed >= 0


def test_budget_exceeded_raises():
    cfg = SearchConfig(budget_seconds=0.0)
    with pytest.raises(BudgetExceededError):
        solve(GameSpec("ham", 7), MAKER, cfg)


def test_play_on_terminal_board_raises():
    engine = Engine(GameSpec("ham", 4))
    p = MAKER
    for e in range(engine.board.E):
        engine.do(e, p)
        p = other_player(p)
    with pytest.raises(IllegalStateError):
        engine.play(MAKER)


def test_tt_rejects_conflicting_winners():
    tt = TranspositionTable()
    tt.insert(b"key", MAKER, 0)
    tt.insert(b"key", MAKER, 5)  # duplicate insert is fine
    with pytest.raises(IllegalStateError):
        tt.insert(b"key", BREAKER, 0)


def test_tt_eviction_keeps_shallow_entries():
    tt = TranspositionTable(max_entries=4, keep_depth=1)
    tt.insert(b"a", MAKER, 0)
    tt.insert(b"b", MAKER, 1)
    tt.insert(b"c", MAKER, 9)
    tt.insert(b"d", MAKER, 9)
    tt.insert(b"e", MAKER, 9)  # triggers eviction of the deep entries
    assert tt.get(b"a") == MAKER
    assert tt.get(b"b") == MAKER
    assert tt.get(b"c") is None


def test_shared_tt_changes_speed_not_result():
    spec = GameSpec("ham", 5)
    tt = TranspositionTable()
    first_run = solve(spec, MAKER, tt=tt)
    second_run = solve(spec, MAKER, tt=tt)
    assert first_run.winner == second_run.winner
    assert second_run.nodes_visited <= first_run.nodes_visited


def test_isomorphic_openings_share_tt_entries():
    """With the TT on, the empty-board solve must not redo symmetric
    openings: node count is far below the no-TT count."""
    spec = GameSpec("ham", 5)
    with_tt = solve(spec, MAKER, SearchConfig(tt=True))
    without = solve(spec, MAKER, SearchConfig(tt=False))
    assert with_tt.winner == without.winner
    assert with_tt.nodes_visited < without.nodes_visited


def best_move_is_sound(spec, first):
    """If best_move returns an edge, playing it preserves the win; if it
    returns None, the position really is lost."""
    winner = naive_solve(spec, first)
    engine = Engine(spec)
    mv = engine.best_move(first)
    if winner == first:
        assert mv is not None
        engine.do(mv, first)
        if not engine.won_by(first):
            assert engine.play(other_player(first)) == first
    else:
        assert mv is None


@pytest.mark.parametrize("spec", [GameSpec("ham", 5), GameSpec("hp", 4),
                                  GameSpec("fhp", 5, (0, 1))], ids=str)
@pytest.mark.parametrize("first", (MAKER, BREAKER), ids=("maker", "breaker"))
def test_best_move_soundness(spec, first):
    best_move_is_sound(spec, first)


def test_standalone_best_move_rebuilds_position():
    spec = GameSpec("hp", 5)
    engine = Engine(spec)
    engine.do(0, MAKER)
    engine.do(5, BREAKER)
    via_engine = engine.best_move(MAKER)
    via_board = best_move(engine.board, MAKER, spec)
    assert via_engine == via_board


def test_full_playout_from_best_moves_reaches_claimed_winner():
    """The engine playing both sides must land on the solved winner."""
    for spec, first in [(GameSpec("ham", 5), MAKER), (GameSpec("hp", 5), BREAKER)]:
        predicted = solve(spec, first).winner
        engine = Engine(spec)
        p = first
        winner = None
        while engine.board.free_count:
            mv = engine.best_move(p)
            if mv is None:
                mv = engine.order_moves(p)[0]
            engine.do(mv, p)
            if engine.won_by(p):
                winner = p
                break
            p = other_player(p)
        if winner is None:
            winner = BREAKER
        assert winner == predicted
