"""Exact solving and constructive strategies for Maker-Breaker games on
graph edges: Hamiltonicity, Hamiltonian path (free and fixed-endpoint),
connectivity and perfect matching on small complete graphs, plus a
sparse-board Hamiltonicity construction."""

from .board import (
    ABSENT,
    BREAKER,
    Board,
    FREE,
    MAKER,
    IllegalMoveError,
    edge_index,
    edge_pairs,
    format_board,
    num_edges,
    other_player,
    parse_board,
    player_name,
)
from .canon import canonical_key, count_classes
from .games import GameSpec, WinningSetFamily, generate_winning_sets, make_family, player_wins
from .solver import (
    BudgetExceededError,
    Engine,
    SearchConfig,
    SolveOutcome,
    TranspositionTable,
    best_move,
    naive_solve,
    solve,
)
from .strategy import (
    FhpExtensionStrategy,
    HamExtensionStrategy,
    PairLinker,
    SolveCache,
    SparseGraphSpec,
    SparseMakerStrategy,
    StrategyFailureError,
    build_sparse_graph,
    exhaustive_e2_check,
    extend_cycle,
    find_hamiltonian_cycle,
    find_hamiltonian_path,
)

__version__ = "0.1.0"
