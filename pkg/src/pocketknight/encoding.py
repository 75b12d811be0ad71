"""Board-to-tensor encoding and move/policy-index mappings.

Positions become 34x8x8 plane stacks from the mover's perspective: when
black is to move the board is rank-mirrored with colors swapped, so the
mover always plays "up" and the queen starts left of the king. Moves map
into two interchangeable policy spaces:

* ``uci-2272``: a frozen table of 2272 UCI move strings (queen promotions
  carry the ``q`` suffix and are distinct from the plain move),
* ``map-5184``: 81 geometric planes of 64 squares each (56 queen-direction
  planes, 8 knight planes, 12 promotion planes, 5 drop planes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from pocketknight import rules
from pocketknight.rules import (
    BISHOP, BLACK, KNIGHT, PAWN, QUEEN, ROOK, WHITE,
    GameState, Move, square, square_name,
)

SCHEME_UCI = "uci-2272"
SCHEME_MAP = "map-5184"
SCHEMES = (SCHEME_UCI, SCHEME_MAP)

PLANE_COUNT = 34
POCKET_NORM = 32.0
MOVE_COUNT_NORM = 500.0
NO_PROGRESS_NORM = 40.0

# Queen-move compass directions, (df, dr), plane order N NE E SE S SW W NW.
QUEEN_DIRECTIONS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
# Knight directions, plane order 2N1E 1N2E 1S2E 2S1E 2S1W 1S2W 1N2W 2N1W.
KNIGHT_DIRECTIONS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
# Promotion target-file offsets: capture-left, push, capture-right.
PROMOTION_DIRECTIONS = (-1, 0, 1)
PROMOTION_PIECES = (KNIGHT, BISHOP, ROOK, QUEEN)
DROP_PIECES = (PAWN, KNIGHT, BISHOP, ROOK, QUEEN)

_QUEEN_PLANES = 56
_KNIGHT_PLANES = 8
_PROMOTION_PLANES = 12
_DROP_PLANES = 5
MAP_PLANES = _QUEEN_PLANES + _KNIGHT_PLANES + _PROMOTION_PLANES + _DROP_PLANES


class DecodeError(ValueError):
    """Raised when a policy slot does not describe a geometrically valid move."""


class EncodeError(ValueError):
    """Raised when a move cannot be represented in the chosen scheme."""


def scheme_size(scheme: str) -> int:
    if scheme == SCHEME_UCI:
        return 2272
    if scheme == SCHEME_MAP:
        return MAP_PLANES * 64
    raise ValueError(f"unknown policy scheme {scheme!r}")


# ---------------------------------------------------------------------------
# uci-2272 label table
# ---------------------------------------------------------------------------

def _generate_uci_labels() -> Tuple[str, ...]:
    labels: List[str] = []
    for from_sq in range(64):
        f, r = from_sq & 7, from_sq >> 3
        for df, dr in QUEEN_DIRECTIONS:
            for dist in range(1, 8):
                nf, nr = f + df * dist, r + dr * dist
                if not (0 <= nf < 8 and 0 <= nr < 8):
                    break
                labels.append(square_name(from_sq) + square_name(square(nf, nr)))
    for from_sq in range(64):
        f, r = from_sq & 7, from_sq >> 3
        for df, dr in KNIGHT_DIRECTIONS:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                labels.append(square_name(from_sq) + square_name(square(nf, nr)))
    for from_sq in range(64):
        f, r = from_sq & 7, from_sq >> 3
        if r == 6:
            targets = [(f + d, 7) for d in PROMOTION_DIRECTIONS]
        elif r == 1:
            targets = [(f + d, 0) for d in PROMOTION_DIRECTIONS]
        else:
            continue
        for nf, nr in targets:
            if not 0 <= nf < 8:
                continue
            to = square_name(square(nf, nr))
            for piece in ("n", "b", "r", "q"):
                labels.append(square_name(from_sq) + to + piece)
    for piece in DROP_PIECES:
        for sq in range(64):
            if piece == PAWN and not 8 <= sq < 56:
                continue
            labels.append(rules.PIECE_CHARS[piece] + "@" + square_name(sq))
    return tuple(labels)


UCI_LABELS = _generate_uci_labels()
_UCI_INDEX = {label: i for i, label in enumerate(UCI_LABELS)}
assert len(UCI_LABELS) == 2272 and len(_UCI_INDEX) == 2272


def write_label_table(path) -> None:
    """Export the frozen uci-2272 label table, one move string per line."""
    with open(path, "w", encoding="ascii") as handle:
        for label in UCI_LABELS:
            handle.write(label + "\n")


# ---------------------------------------------------------------------------
# Perspective mirroring
# ---------------------------------------------------------------------------

def mirror_move(move: Move) -> Move:
    """Flip a move across the rank axis (files preserved)."""
    if move.drop is not None:
        return Move(None, move.to_sq ^ 56, drop=move.drop)
    return Move(move.from_sq ^ 56, move.to_sq ^ 56, move.promotion)


def _mover_view(move: Move, state: GameState) -> Move:
    return mirror_move(move) if state.turn == BLACK else move


# ---------------------------------------------------------------------------
# Input planes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InputPlanes:
    """Normalized 34x8x8 feature stack for one position."""

    values: np.ndarray
    perspective: int

    def __post_init__(self):
        if self.values.shape != (PLANE_COUNT, 8, 8):
            raise ValueError(f"bad plane shape {self.values.shape}")


def encode_planes(state: GameState) -> InputPlanes:
    """Encode a position from the mover's perspective.

    Scalar features broadcast one value over the full 8x8 plane; pocket
    counts divide by 32, the fullmove count by 500 and the no-progress
    counter by 40. These maxima are soft: larger raw values pass through
    above 1.0 rather than clamping.
    """
    mover = state.turn
    planes = np.zeros((PLANE_COUNT, 8, 8), dtype=np.float32)
    flip = mover == BLACK

    def rows_files(bb: int):
        while bb:
            low = bb & -bb
            sq = low.bit_length() - 1
            bb ^= low
            rank, file = sq >> 3, sq & 7
            yield (7 - rank if flip else rank), file

    for perspective in range(2):  # 0 = mover (P1), 1 = opponent (P2)
        color = mover ^ perspective
        for piece in range(6):
            plane = perspective * 6 + piece
            for row, file in rows_files(state.boards[color * 6 + piece]):
                planes[plane, row, file] = 1.0

    reps = rules.repetition_count(state)
    if reps >= 2:
        planes[12] = 1.0
    if reps >= 3:
        planes[13] = 1.0

    for perspective in range(2):
        color = mover ^ perspective
        for piece in rules.POCKET_PIECES:
            planes[14 + perspective * 5 + piece] = \
                state.pockets[color * 5 + piece] / POCKET_NORM

    for perspective in range(2):
        color = mover ^ perspective
        for row, file in rows_files(state.promoted[color]):
            planes[24 + perspective, row, file] = 1.0

    if state.ep_square is not None:
        rank, file = state.ep_square >> 3, state.ep_square & 7
        planes[26, 7 - rank if flip else rank, file] = 1.0

    planes[27] = 1.0 if mover == WHITE else 0.0
    planes[28] = state.fullmove_number / MOVE_COUNT_NORM

    castle_bits = (
        (rules.W_KS, rules.W_QS, rules.B_KS, rules.B_QS) if mover == WHITE
        else (rules.B_KS, rules.B_QS, rules.W_KS, rules.W_QS)
    )
    for i, bit in enumerate(castle_bits):
        if state.castling & bit:
            planes[29 + i] = 1.0

    planes[33] = state.halfmove_clock / NO_PROGRESS_NORM
    return InputPlanes(values=planes, perspective=mover)


# ---------------------------------------------------------------------------
# Policy indices
# ---------------------------------------------------------------------------

def _map_index(move: Move) -> int:
    """map-5184 slot of a mover-view move."""
    if move.drop is not None:
        plane = _QUEEN_PLANES + _KNIGHT_PLANES + _PROMOTION_PLANES + DROP_PIECES.index(move.drop)
        return plane * 64 + move.to_sq
    ff, fr = move.from_sq & 7, move.from_sq >> 3
    tf, tr = move.to_sq & 7, move.to_sq >> 3
    df, dr = tf - ff, tr - fr
    if move.promotion is not None:
        if fr != 6 or tr != 7 or df not in PROMOTION_DIRECTIONS:
            raise EncodeError(f"unrepresentable promotion {move.uci()}")
        plane = (_QUEEN_PLANES + _KNIGHT_PLANES
                 + PROMOTION_PIECES.index(move.promotion) * 3
                 + PROMOTION_DIRECTIONS.index(df))
        return plane * 64 + move.from_sq
    if (df, dr) in KNIGHT_DIRECTIONS:
        plane = _QUEEN_PLANES + KNIGHT_DIRECTIONS.index((df, dr))
        return plane * 64 + move.from_sq
    dist = max(abs(df), abs(dr))
    if dist == 0 or (df and dr and abs(df) != abs(dr)):
        raise EncodeError(f"unrepresentable move {move.uci()}")
    step = (df // dist, dr // dist)
    if step not in QUEEN_DIRECTIONS:
        raise EncodeError(f"unrepresentable move {move.uci()}")
    plane = QUEEN_DIRECTIONS.index(step) * 7 + dist - 1
    return plane * 64 + move.from_sq


def _map_decode(index: int) -> Move:
    """Mover-view move of a map-5184 slot; DecodeError for void geometry."""
    plane, from_sq = divmod(index, 64)
    f, r = from_sq & 7, from_sq >> 3
    if plane < _QUEEN_PLANES:
        df, dr = QUEEN_DIRECTIONS[plane // 7]
        dist = plane % 7 + 1
        nf, nr = f + df * dist, r + dr * dist
        if not (0 <= nf < 8 and 0 <= nr < 8):
            raise DecodeError(f"slot {index}: destination off board")
        return Move(from_sq, square(nf, nr))
    plane -= _QUEEN_PLANES
    if plane < _KNIGHT_PLANES:
        df, dr = KNIGHT_DIRECTIONS[plane]
        nf, nr = f + df, r + dr
        if not (0 <= nf < 8 and 0 <= nr < 8):
            raise DecodeError(f"slot {index}: destination off board")
        return Move(from_sq, square(nf, nr))
    plane -= _KNIGHT_PLANES
    if plane < _PROMOTION_PLANES:
        piece = PROMOTION_PIECES[plane // 3]
        df = PROMOTION_DIRECTIONS[plane % 3]
        nf = f + df
        if r != 6 or not 0 <= nf < 8:
            raise DecodeError(f"slot {index}: invalid promotion origin")
        return Move(from_sq, square(nf, 7), piece)
    plane -= _PROMOTION_PLANES
    piece = DROP_PIECES[plane]
    if piece == PAWN and not 8 <= from_sq < 56:
        raise DecodeError(f"slot {index}: pawn drop on back rank")
    return Move(None, from_sq, drop=piece)


def policy_index(move: Move, state: GameState, scheme: str = SCHEME_UCI) -> int:
    """Index of a legal move in the chosen policy space (mover perspective)."""
    view = _mover_view(move, state)
    if scheme == SCHEME_UCI:
        try:
            return _UCI_INDEX[view.uci()]
        except KeyError:
            raise EncodeError(f"move {move.uci()} not in uci-2272 table") from None
    if scheme == SCHEME_MAP:
        return _map_index(view)
    raise ValueError(f"unknown policy scheme {scheme!r}")


def decode_index(index: int, state: GameState, scheme: str = SCHEME_UCI) -> Move:
    """Inverse of :func:`policy_index`, back in the true board frame."""
    if not 0 <= index < scheme_size(scheme):
        raise DecodeError(f"index {index} out of range for {scheme}")
    if scheme == SCHEME_UCI:
        view = rules.parse_move_uci(UCI_LABELS[index])
    else:
        view = _map_decode(index)
    return mirror_move(view) if state.turn == BLACK else view


def legal_policy_mask(state: GameState, scheme: str = SCHEME_UCI) -> np.ndarray:
    """Boolean vector, true exactly at indices of legal moves."""
    mask = np.zeros(scheme_size(scheme), dtype=bool)
    for move in rules.legal_moves(state):
        mask[policy_index(move, state, scheme)] = True
    return mask


# ---------------------------------------------------------------------------
# Training samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainingSample:
    """One supervised example: planes, played-move index, game result label.

    ``value`` is the final game outcome in {-1, 0, +1} from the mover's
    point of view at this position.
    """

    planes: np.ndarray
    policy: int
    value: int
    scheme: str = SCHEME_UCI

    def __post_init__(self):
        if self.value not in (-1, 0, 1):
            raise ValueError(f"bad value target {self.value}")
        if not 0 <= self.policy < scheme_size(self.scheme):
            raise ValueError(f"policy index {self.policy} out of range")
