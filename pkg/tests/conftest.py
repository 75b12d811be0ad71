import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pocketknight import rules

DATA = Path(__file__).parent / "data"


def random_playout_states(count, seed=0, max_plies=120):
    """Positions sampled from random legal play, restarting at terminals."""
    rng = random.Random(seed)
    states = []
    state = rules.initial_state()
    plies = 0
    while len(states) < count:
        moves = rules.legal_moves(state)
        if not moves or rules.outcome(state) is not None or plies >= max_plies:
            state = rules.initial_state()
            plies = 0
            continue
        state = rules.apply_move(state, rng.choice(moves))
        plies += 1
        states.append(state)
    return states


@pytest.fixture(scope="session")
def corpus_small():
    return random_playout_states(200, seed=11)


@pytest.fixture(scope="session")
def corpus_large():
    return random_playout_states(1000, seed=29)


@pytest.fixture(scope="session")
def appendix_games():
    from pocketknight import pgn
    return pgn.read_games_file(DATA / "appendix_games.pgn")


@pytest.fixture(scope="session")
def casual_games():
    from pocketknight import pgn
    return pgn.read_games_file(DATA / "casual_games.pgn")


@pytest.fixture(scope="session")
def mate_in_one_fens():
    return [line.strip() for line in (DATA / "mate_in_one.fens").read_text().splitlines()
            if line.strip()]
