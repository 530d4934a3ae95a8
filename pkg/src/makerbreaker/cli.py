"""Command-line front end.

Subcommands:
  solve      exact winner of one game
  table      winner tables over a range of n, text or JSON
  validate   exhaustive pairing-rule check / strategy simulations
  construct  emit the sparse Hamiltonicity host graph
  play       interactive game against the exact engine
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .board import BREAKER, MAKER, Board, IllegalMoveError, edge_index, player_name
from .games import ENUMERATIVE_KINDS, KINDS, GameSpec
from .solver import BudgetExceededError, Engine, SearchConfig, solve
from .strategy import (
    FAILURE,
    FhpExtensionStrategy,
    GreedyBreaker,
    HamExtensionStrategy,
    RandomBreaker,
    SolveCache,
    SparseMakerStrategy,
    build_sparse_graph,
    certify_fixed_path,
    certify_ham_cycle,
    exhaustive_e2_check,
    play_strategy_game,
)

_PLAYERS = {"maker": MAKER, "breaker": BREAKER}


def _parse_fixed(s: str) -> tuple[int, int]:
    try:
        u, v = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'u,v'") from None
    return (u, v)


def _spec_from(args) -> GameSpec:
    fixed = None
    if args.game == "fhp":
        fixed = getattr(args, "fixed", None) or (0, 1)
    return GameSpec(args.game, args.n, fixed_pair=fixed)


def _config_from(args) -> SearchConfig:
    return SearchConfig(
        ordering=not args.no_ordering,
        tt=not args.no_tt,
        tt_max_entries=args.tt_max,
        tt_keep_depth=args.tt_depth,
        budget_seconds=args.budget,
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tt-max", type=int, default=1 << 24)
    p.add_argument("--tt-depth", type=int, default=12)
    p.add_argument("--no-ordering", action="store_true")
    p.add_argument("--no-tt", action="store_true")
    p.add_argument("--budget", type=float, default=3600.0,
                   help="wall-clock seconds per solve (default 3600)")
    p.add_argument("--json", action="store_true")


def _outcome_json(spec: GameSpec, first: int, out) -> dict:
    return {
        "game": spec.kind,
        "n": spec.n,
        "first": player_name(first).lower(),
        "winner": out.winner_name.lower() if out else None,
        "nodes": out.nodes_visited if out else None,
        "tt_hits": out.tt_hits if out else None,
        "elapsed_ms": round(out.elapsed * 1000, 3) if out else None,
    }


def cmd_solve(args) -> int:
    spec = _spec_from(args)
    first = _PLAYERS[args.first]
    config = _config_from(args)
    out = solve(spec, first, config)
    rec = _outcome_json(spec, first, out)
    rec["config"] = {"ordering": config.ordering, "tt": config.tt,
                     "tt_max_entries": config.tt_max_entries,
                     "tt_keep_depth": config.tt_keep_depth}
    if args.json:
        print(json.dumps(rec))
    else:
        print(f"{spec.kind} n={spec.n} first={args.first}: "
              f"winner={out.winner_name} nodes={out.nodes_visited} "
              f"tt_hits={out.tt_hits} elapsed={out.elapsed:.2f}s")
    return 0


def cmd_table(args) -> int:
    first_list = [MAKER, BREAKER] if args.first == "both" else [_PLAYERS[args.first]]
    config = _config_from(args)
    rows = []
    skipped = 0
    for n in range(args.n_min, args.n_max + 1):
        for first in first_list:
            spec = GameSpec(args.game, n, fixed_pair=(0, 1) if args.game == "fhp" else None)
            try:
                out = solve(spec, first, config)
                rows.append(_outcome_json(spec, first, out))
            except BudgetExceededError:
                skipped += 1
                rec = _outcome_json(spec, first, None)
                rec["winner"] = "skipped"
                rows.append(rec)
    if args.json:
        print(json.dumps({"game": args.game, "cells": rows}))
    else:
        print(f"{'n':>3} {'first':>8} {'winner':>8} {'nodes':>10} {'time':>9}")
        for r in rows:
            t = "-" if r["elapsed_ms"] is None else f"{r['elapsed_ms']/1000:.2f}s"
            nodes = "-" if r["nodes"] is None else r["nodes"]
            print(f"{r['n']:>3} {r['first']:>8} {r['winner']:>8} {nodes:>10} {t:>9}")
    if skipped and args.strict:
        return 1
    return 0


def _run_simulations(factory, certify, n_random: int, n_greedy: int, seed: int):
    losses = []
    wins = 0
    for i in range(n_random):
        rng = random.Random(seed + i)
        strategy = factory()
        rec = play_strategy_game(strategy, RandomBreaker(rng), certify=certify)
        if rec.maker_won:
            wins += 1
        else:
            losses.append((seed + i, rec.moves))
    for i in range(n_greedy):
        strategy = factory()
        rec = play_strategy_game(strategy, GreedyBreaker(), certify=certify)
        if rec.maker_won:
            wins += 1
        else:
            losses.append(("greedy", rec.moves))
    return wins, losses


def cmd_validate(args) -> int:
    if args.target == "e2":
        total_failures = 0
        for variant in ("ham", "fhp"):
            counts = exhaustive_e2_check(args.n, variant)
            print(f"e2 variant={variant} n_side={args.n}: {counts}")
            total_failures += counts[FAILURE]
        print(f"failures = {total_failures}")
        return 0 if total_failures == 0 else 1

    cache = SolveCache()
    if args.target == "ham-ext":
        n_total = args.n + 2
        factory = lambda: HamExtensionStrategy(n_total, cache)  # noqa: E731
        certify = certify_ham_cycle(n_total)
        label = f"ham-ext n_total={n_total}"
    elif args.target == "fhp-ext":
        n_total = args.n + 2
        factory = lambda: FhpExtensionStrategy(n_total, 0, 1, cache)  # noqa: E731
        certify = certify_fixed_path(n_total, 0, 1)
        label = f"fhp-ext n_total={n_total}"
    elif args.target == "sparse":
        graph = build_sparse_graph(args.n)
        factory = lambda: SparseMakerStrategy(graph, cache)  # noqa: E731
        certify = certify_ham_cycle(args.n)
        label = f"sparse n={args.n}"
    else:
        raise AssertionError(args.target)

    wins, losses = _run_simulations(factory, certify, args.games, args.greedy_games, args.seed)
    print(f"{label}: wins={wins} losses={len(losses)} "
          f"(random={args.games} greedy={args.greedy_games} seed={args.seed})")
    for tag, moves in losses[:5]:
        print(f"  LOSS seed={tag} moves={moves}")
    return 0 if not losses else 1


def cmd_construct(args) -> int:
    graph = build_sparse_graph(args.n)
    edges = graph.present_edges()
    lines = [f"{graph.n} {len(edges)}"]
    lines += [f"{u} {v} F" for u, v in edges]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    bound = 4 * graph.n
    status = "ok" if len(edges) <= bound else "exceeded"
    print(f"n={graph.n} m={graph.m} r={graph.r} edges={len(edges)} "
          f"bound={bound} {status}", file=sys.stderr)
    return 0


def cmd_play(args) -> int:
    spec = _spec_from(args)
    human = _PLAYERS[args.human]
    engine_player = MAKER + BREAKER - human
    engine = Engine(spec, _config_from(args))
    board = engine.board
    to_move = _PLAYERS[args.first]
    transcript = []
    print(f"playing {spec.kind} on K_{spec.n}; you are {player_name(human)}; "
          f"enter moves as 'u v', or 'resign'")
    winner = None
    while board.free_count and winner is None:
        if to_move == human:
            line = input(f"{player_name(human)}> ").strip()
            if line in ("resign", "--resign"):
                print("transcript:", transcript)
                return 0
            try:
                u, v = (int(x) for x in line.split())
                e = edge_index(u, v, spec.n)
                engine.do(e, human)
            except (ValueError, IllegalMoveError) as exc:
                print(f"illegal move ({exc}); try again")
                continue
            transcript.append((u, v, player_name(human)))
        else:
            e = engine.best_move(engine_player)
            if e is None:
                e = board.free_edges()[0]
            engine.do(e, engine_player)
            u, v = board.pairs[e]
            transcript.append((u, v, player_name(engine_player)))
            print(f"{player_name(engine_player)} claims ({u}, {v})")
        if engine.won_by(to_move):
            winner = to_move
        to_move = MAKER + BREAKER - to_move
    if winner is None:
        winner = BREAKER  # full board without a Maker structure
    print(f"winner: {player_name(winner)}")
    print("transcript:", transcript)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="makerbreaker")
    sub = p.add_subparsers(dest="cmd", required=True)

    ps = sub.add_parser("solve", help="exact winner of one game")
    ps.add_argument("--game", choices=KINDS, required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--first", choices=("maker", "breaker"), required=True)
    ps.add_argument("--fixed", type=_parse_fixed, default=None)
    _add_solver_flags(ps)
    ps.set_defaults(fn=cmd_solve)

    pt = sub.add_parser("table", help="winner table over a range of n")
    pt.add_argument("--game", choices=KINDS, required=True)
    pt.add_argument("--n-min", type=int, required=True)
    pt.add_argument("--n-max", type=int, required=True)
    pt.add_argument("--first", choices=("maker", "breaker", "both"), default="both")
    pt.add_argument("--strict", action="store_true",
                    help="nonzero exit if any cell exceeded the budget")
    _add_solver_flags(pt)
    pt.set_defaults(fn=cmd_table)

    pv = sub.add_parser("validate", help="strategy validation suites")
    pv.add_argument("target", choices=("e2", "ham-ext", "fhp-ext", "sparse"))
    pv.add_argument("--n", type=int, required=True,
                    help="e2: side vertices; ham-ext/fhp-ext: base n; sparse: host n")
    pv.add_argument("--games", type=int, default=1000)
    pv.add_argument("--greedy-games", type=int, default=10)
    pv.add_argument("--seed", type=int, default=1)
    pv.set_defaults(fn=cmd_validate)

    pc = sub.add_parser("construct", help="emit the sparse host graph")
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--out", default=None)
    pc.set_defaults(fn=cmd_construct)

    pp = sub.add_parser("play", help="interactive game against the engine")
    pp.add_argument("--game", choices=KINDS, required=True)
    pp.add_argument("--n", type=int, required=True)
    pp.add_argument("--human", choices=("maker", "breaker"), required=True)
    pp.add_argument("--first", choices=("maker", "breaker"), default="maker")
    pp.add_argument("--fixed", type=_parse_fixed, default=None)
    _add_solver_flags(pp)
    pp.set_defaults(fn=cmd_play)

    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
