"""Pairing rules, cycle extension, composed strategies, sparse host graph."""

import random

import pytest

from makerbreaker.board import BREAKER, FREE, MAKER, Board, edge_index
from makerbreaker.strategy import (
    FAILURE,
    SITUATION1,
    SITUATION2,
    FhpExtensionStrategy,
    GreedyBreaker,
    HamExtensionStrategy,
    NoExtensionError,
    PairLinker,
    RandomBreaker,
    SolveCache,
    SparseMakerStrategy,
    StrategyFailureError,
    build_sparse_graph,
    certify_fixed_path,
    certify_ham_cycle,
    exhaustive_e2_check,
    extend_cycle,
    find_hamiltonian_cycle,
    find_hamiltonian_path,
    play_strategy_game,
)

from conftest import slow


# -- pairing rules ----------------------------------------------------------


def make_linker(n_side=4):
    return PairLinker(list(range(n_side)), n_side, n_side + 1)


def test_rule2_blocks_half_isolation():
    lk = make_linker()
    # Breaker takes (0, s0); rule 2 demands Maker answer with (0, s1)
    mx, ms = lk.respond_to(0, lk.s0)
    assert (mx, ms) == (0, lk.s1)


def test_rule3_prefers_less_connected_special():
    lk = make_linker()
    lk.record(0, lk.s0, BREAKER)
    lk.record(0, lk.s1, MAKER)  # m1 = 1, m0 = 0
    mx, ms = lk.choose()
    assert ms == lk.s0  # fewer Maker edges
    assert mx == 1  # lowest free vertex


def test_rule1_connects_last_free_vertex_to_bare_special():
    lk = make_linker(2)
    lk.record(0, lk.s0, MAKER)
    lk.record(0, lk.s1, BREAKER)
    # vertex 1 is the only fully free vertex and s1 has no Maker edge
    assert lk.choose() == (1, lk.s1)


def test_rule4_completes_maker_half_isolated_vertex():
    lk = make_linker(2)
    lk.record(0, lk.s0, MAKER)
    lk.record(1, lk.s0, BREAKER)
    lk.record(1, lk.s1, MAKER)
    # no free vertex, nobody half-Breaker-isolated; rule 4 picks (0, s1)
    assert lk.choose() == (0, lk.s1)


def test_double_claim_raises():
    lk = make_linker()
    lk.record(0, lk.s0, BREAKER)
    with pytest.raises(StrategyFailureError):
        lk.record(0, lk.s0, MAKER)


def test_classify_situations():
    lk = make_linker(3)
    for x in (0, 1, 2):
        lk.record(x, lk.s0, MAKER)
        lk.record(x, lk.s1, BREAKER if x else MAKER)
    assert lk.classify().situation == SITUATION1

    lk2 = make_linker(5)
    # two Breaker-isolated, one Maker-isolated, both specials still served
    # by edges avoiding the Maker-isolated vertex
    lk2.record(0, lk2.s0, BREAKER); lk2.record(0, lk2.s1, BREAKER)
    lk2.record(1, lk2.s0, BREAKER); lk2.record(1, lk2.s1, BREAKER)
    lk2.record(2, lk2.s0, MAKER); lk2.record(2, lk2.s1, MAKER)
    lk2.record(3, lk2.s0, MAKER); lk2.record(3, lk2.s1, BREAKER)
    lk2.record(4, lk2.s0, BREAKER); lk2.record(4, lk2.s1, MAKER)
    out = lk2.classify()
    assert out.situation == SITUATION2
    assert out.witness == 2  # the Maker-isolated vertex

    lk3 = make_linker(2)
    for x in (0, 1):
        lk3.record(x, lk3.s0, BREAKER)
        lk3.record(x, lk3.s1, BREAKER)
    assert lk3.classify().situation == FAILURE


def test_labels_reflect_maker_edges():
    lk = make_linker(2)
    lk.record(0, lk.s0, MAKER)
    lk.record(0, lk.s1, BREAKER)
    lk.record(1, lk.s0, BREAKER)
    lk.record(1, lk.s1, MAKER)
    assert lk.labels() == {0: frozenset({0}), 1: frozenset({1})}


def test_exhaustive_e2_small_sides_have_no_failures_from_five():
    # the rulebook needs enough side vertices; from 5 up both variants
    # are failure-free at these sizes
    for n_side in (5, 6):
        for variant in ("ham", "fhp"):
            counts = exhaustive_e2_check(n_side, variant)
            assert counts[FAILURE] == 0, (n_side, variant, counts)
            assert counts[SITUATION1] > 0


def test_exhaustive_e2_rejects_bad_variant():
    with pytest.raises(ValueError):
        exhaustive_e2_check(4, "nope")


# -- extraction helpers -------------------------------------------------------


def test_extend_cycle_inserts_at_labeled_pair():
    cycle = [0, 1, 2, 3]
    labels = {1: frozenset({0}), 2: frozenset({1})}
    assert extend_cycle(cycle, labels, 9, 8) == [0, 1, 9, 8, 2, 3]


def test_extend_cycle_reversed_orientation():
    cycle = [0, 1, 2, 3]
    labels = {2: frozenset({0}), 1: frozenset({1})}
    assert extend_cycle(cycle, labels, 9, 8) == [0, 1, 8, 9, 2, 3]


def test_extend_cycle_wraps_around():
    cycle = [0, 1, 2, 3]
    labels = {3: frozenset({0}), 0: frozenset({1})}
    assert extend_cycle(cycle, labels, 9, 8) == [0, 1, 2, 3, 9, 8]


def test_extend_cycle_without_labeled_pair_raises():
    with pytest.raises(NoExtensionError):
        extend_cycle([0, 1, 2], {0: frozenset({0})}, 9, 8)


def adj_from_edges(n, edges):
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def test_find_hamiltonian_cycle():
    adj = adj_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    cyc = find_hamiltonian_cycle(adj, 4)
    assert sorted(cyc) == [0, 1, 2, 3]
    adj_path = adj_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert find_hamiltonian_cycle(adj_path, 4) is None


def test_find_hamiltonian_path():
    adj = adj_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert find_hamiltonian_path(adj, 4, 0, 3) == [0, 1, 2, 3]
    assert find_hamiltonian_path(adj, 4, 0, 2) is None


# -- composed strategies -------------------------------------------------------


def maker_owns_cycle(strategy, cycle):
    adj = strategy.maker_adj()
    return all(adj[a] >> b & 1 for a, b in zip(cycle, cycle[1:] + cycle[:1]))


def test_ham_extension_beats_random_breakers():
    cache = SolveCache()
    n = 10
    for seed in range(3):
        s = HamExtensionStrategy(n, cache)
        rec = play_strategy_game(s, RandomBreaker(random.Random(seed)),
                                 certify=certify_ham_cycle(n))
        assert rec.maker_won
        cycle = s.extended_cycle()
        assert sorted(cycle) == list(range(n))
        assert maker_owns_cycle(s, cycle)


def test_fhp_extension_beats_random_breakers():
    cache = SolveCache()
    n, u, v = 10, 0, 1
    for seed in range(3):
        s = FhpExtensionStrategy(n, u, v, cache)
        rec = play_strategy_game(s, RandomBreaker(random.Random(seed)),
                                 certify=certify_fixed_path(n, u, v))
        assert rec.maker_won
        path = s.extended_path()
        assert path[0] == u and path[-1] == v
        assert sorted(path) == list(range(n))
        adj = s.maker_adj()
        assert all(adj[a] >> b & 1 for a, b in zip(path, path[1:]))
        # the chord (u, v) is in no winning set and must stay unclaimed
        # by Maker
        assert not adj[u] >> v & 1


def test_extension_rejects_too_small_base():
    with pytest.raises(ValueError):
        HamExtensionStrategy(9)
    with pytest.raises(ValueError):
        FhpExtensionStrategy(8)


# -- sparse host graph ---------------------------------------------------------


def test_build_sparse_graph_shapes():
    g = build_sparse_graph(14)
    assert (g.m, g.r, g.d) == (2, 0, 7)
    assert g.edge_count() == 27 * 2
    assert len(g.present_edges()) == g.edge_count()
    g2 = build_sparse_graph(23)
    assert (g2.m, g2.r) == (3, 2)
    assert g2.edge_count() == 27 * 3 + 8 * 2
    assert len(g2.present_edges()) == g2.edge_count()
    with pytest.raises(ValueError):
        build_sparse_graph(13)


def test_sparse_edge_formula_and_bound():
    for n in range(14, 1001):
        g = build_sparse_graph(n)
        assert len(g.present_edges()) == g.edge_count()
        if g.r <= g.m:
            # the exact 7/8-part construction: closed form holds
            assert g.edge_count() == 27 * g.m + 8 * g.r
        else:
            # no cycle of 8/9-cliques exists for these n (7a + 8b = n is
            # unsolvable); the builder falls back to evenly-sized parts
            assert all((n - 8 * b) % 7 or n - 8 * b < 0 for b in range(n // 8 + 1))
            assert {len(p) for p in g.parts} <= {g.d + g.r // g.m, g.d + g.r // g.m + 1}
        assert sum(len(p) for p in g.parts) == n
        assert min(len(p) for p in g.parts) >= 7
        if n >= 336:
            assert g.edge_count() <= 4 * n


def test_sparse_blocks_cover_all_vertices_and_miss_anchor_edges():
    g = build_sparse_graph(16)
    covered = set()
    for w, (a, b) in g.blocks():
        covered.update(w)
        assert a in w and b in w
        assert (min(a, b), max(a, b)) not in g.present_edges()
    assert covered == set(range(16))


def test_sparse_host_degrees_are_low():
    g = build_sparse_graph(700)  # n >= 336 regime
    deg = [0] * g.n
    for u, v in g.present_edges():
        deg[u] += 1
        deg[v] += 1
    assert max(deg) <= 16  # anchors sit in two cliques


@slow
def test_sparse_strategy_wins_on_g14():
    g = build_sparse_graph(14)
    cache = SolveCache()
    for seed in range(3):
        s = SparseMakerStrategy(g, cache)
        rec = play_strategy_game(s, RandomBreaker(random.Random(seed)),
                                 certify=certify_ham_cycle(14))
        assert rec.maker_won
        cycle = s.maker_cycle()
        assert sorted(cycle) == list(range(14))
        assert maker_owns_cycle(s, cycle)
    s = SparseMakerStrategy(g, cache)
    rec = play_strategy_game(s, GreedyBreaker(), certify=certify_ham_cycle(14))
    assert rec.maker_won


# -- harness ---------------------------------------------------------------------


def test_play_strategy_game_alternates_and_fills_board():
    cache = SolveCache()
    s = HamExtensionStrategy(10, cache)
    rec = play_strategy_game(s, RandomBreaker(random.Random(0)),
                             certify=certify_ham_cycle(10))
    assert len(rec.moves) == 45  # all of K_10's edges got claimed
    players = [p for _, p in rec.moves]
    assert players[::2] == [BREAKER] * 23
    assert players[1::2] == [MAKER] * 22
    assert rec.certificate is not None


def test_greedy_breaker_maximizes_edge_degree():
    board = Board(5)
    board.do_move(edge_index(0, 1, 5), BREAKER)
    board.do_move(edge_index(0, 2, 5), BREAKER)
    e = GreedyBreaker().choose(board)
    assert e == edge_index(0, 3, 5)  # ed_B = 2, lowest id among maxima
