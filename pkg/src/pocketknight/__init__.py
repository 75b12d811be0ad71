"""Crazyhouse chess engine: rules, tensor encodings, PUCT search, UCI front-end,
match harness and PGN-to-sample pipeline."""

from pocketknight.rules import (
    GameState,
    Move,
    Outcome,
    apply_move,
    gives_check,
    initial_state,
    legal_moves,
    outcome,
    parse_fen,
    perft,
    position_key,
    to_fen,
)

__all__ = [
    "GameState",
    "Move",
    "Outcome",
    "apply_move",
    "gives_check",
    "initial_state",
    "legal_moves",
    "outcome",
    "parse_fen",
    "perft",
    "position_key",
    "to_fen",
]

__version__ = "0.1.0"
