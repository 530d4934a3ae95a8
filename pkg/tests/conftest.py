import os
import random

import pytest

from makerbreaker.board import BREAKER, MAKER, Board


RUN_SLOW = os.environ.get("RUN_SLOW") == "1"

slow = pytest.mark.skipif(not RUN_SLOW, reason="long-running; set RUN_SLOW=1")


def random_position(n: int, rng: random.Random, fill: float = 0.5,
                    absent: tuple[int, ...] = ()) -> Board:
    """A board after a random legal alternating prefix of a game."""
    board = Board(n, absent)
    k = int(board.E * fill)
    free = board.free_edges()
    rng.shuffle(free)
    p = MAKER
    for e in free[:k]:
        board.do_move(e, p)
        p = MAKER + BREAKER - p
    return board
