"""Crazyhouse game mechanics: position state, move generation, FEN and SAN.

Board squares are indexed 0..63 with a1 = 0, b1 = 1, ..., h8 = 63.
Bitboards are plain Python ints. A :class:`GameState` is immutable after
construction; :func:`apply_move` returns a new state, so states can be
shared freely across search workers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional

WHITE, BLACK = 0, 1
PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = range(6)

PIECE_CHARS = "PNBRQK"
FILE_NAMES = "abcdefgh"
RANK_NAMES = "12345678"

POCKET_PIECES = (PAWN, KNIGHT, BISHOP, ROOK, QUEEN)

FULL_BOARD = (1 << 64) - 1
RANK_1 = 0x00000000000000FF
RANK_2 = RANK_1 << 8
RANK_3 = RANK_1 << 16
RANK_6 = RANK_1 << 40
RANK_7 = RANK_1 << 48
RANK_8 = RANK_1 << 56
BACK_RANKS = RANK_1 | RANK_8

STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR[] w KQkq - 0 1"

# Castling-rights bits.
W_KS, W_QS, B_KS, B_QS = 1, 2, 4, 8


class IllegalMoveError(ValueError):
    """Raised when a move is not legal in the given position."""


class FenError(ValueError):
    """Raised on malformed FEN input; the message names the offending token."""


class SanError(ValueError):
    """Raised when a SAN token cannot be resolved to a unique legal move."""


def square(file: int, rank: int) -> int:
    return rank * 8 + file


def square_name(sq: int) -> str:
    return FILE_NAMES[sq & 7] + RANK_NAMES[sq >> 3]


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILE_NAMES or name[1] not in RANK_NAMES:
        raise ValueError(f"bad square {name!r}")
    return square(FILE_NAMES.index(name[0]), RANK_NAMES.index(name[1]))


def _bits(bb: int) -> Iterator[int]:
    while bb:
        low = bb & -bb
        yield low.bit_length() - 1
        bb ^= low


# ---------------------------------------------------------------------------
# Attack tables
# ---------------------------------------------------------------------------

def _build_step_table(steps) -> list:
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        bb = 0
        for df, dr in steps:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                bb |= 1 << square(nf, nr)
        table.append(bb)
    return table


KNIGHT_STEPS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
KING_STEPS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))

KNIGHT_ATTACKS = _build_step_table(KNIGHT_STEPS)
KING_ATTACKS = _build_step_table(KING_STEPS)
# PAWN_ATTACKS[color][sq]: squares attacked by a pawn of `color` on `sq`.
PAWN_ATTACKS = (
    _build_step_table(((-1, 1), (1, 1))),
    _build_step_table(((-1, -1), (1, -1))),
)

# Ray directions: (df, dr). Positive index shift <=> increasing square index.
_ROOK_DIRS = ((0, 1), (1, 0), (0, -1), (-1, 0))
_BISHOP_DIRS = ((1, 1), (1, -1), (-1, -1), (-1, 1))


def _build_rays(dirs) -> list:
    rays = []
    for df, dr in dirs:
        table = []
        for sq in range(64):
            f, r = sq & 7, sq >> 3
            bb = 0
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                bb |= 1 << square(nf, nr)
                nf += df
                nr += dr
            table.append(bb)
        rays.append((table, df + dr * 8 > 0))
    return rays


_ROOK_RAYS = _build_rays(_ROOK_DIRS)
_BISHOP_RAYS = _build_rays(_BISHOP_DIRS)


def _slider_attacks(sq: int, occ: int, rays) -> int:
    attacks = 0
    for table, ascending in rays:
        ray = table[sq]
        blockers = ray & occ
        if blockers:
            if ascending:
                first = blockers & -blockers
                first_sq = first.bit_length() - 1
            else:
                first_sq = blockers.bit_length() - 1
            ray ^= table[first_sq]
        attacks |= ray
    return attacks


def rook_attacks(sq: int, occ: int) -> int:
    return _slider_attacks(sq, occ, _ROOK_RAYS)


def bishop_attacks(sq: int, occ: int) -> int:
    return _slider_attacks(sq, occ, _BISHOP_RAYS)


def _build_between_and_line():
    between = [[0] * 64 for _ in range(64)]
    line = [[0] * 64 for _ in range(64)]
    for a in range(64):
        af, ar = a & 7, a >> 3
        for df, dr in _ROOK_DIRS + _BISHOP_DIRS:
            bb = 0
            nf, nr = af + df, ar + dr
            path = []
            while 0 <= nf < 8 and 0 <= nr < 8:
                b = square(nf, nr)
                between[a][b] = bb
                path.append(b)
                bb |= 1 << b
                nf += df
                nr += dr
            full = (1 << a) | bb
            for b in path:
                line[a][b] = full
    return between, line


BETWEEN, LINE = _build_between_and_line()


# ---------------------------------------------------------------------------
# Zobrist keys
# ---------------------------------------------------------------------------

_rng = random.Random(0x5D4B8C)
Z_PIECE = [[_rng.getrandbits(64) for _ in range(64)] for _ in range(12)]
Z_PROMOTED = [[_rng.getrandbits(64) for _ in range(64)] for _ in range(2)]
# Pocket count c contributes XOR of entries [0..c-1], so +-1 changes toggle one entry.
Z_POCKET = [[[_rng.getrandbits(64) for _ in range(64)] for _ in range(5)] for _ in range(2)]
Z_CASTLING = [_rng.getrandbits(64) for _ in range(4)]
Z_EP_FILE = [_rng.getrandbits(64) for _ in range(8)]
Z_TURN = _rng.getrandbits(64)
del _rng


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Move:
    """A board move or a drop.

    Board moves carry ``from_sq``; drops carry ``drop`` (the piece kind)
    instead. ``promotion`` is set only for pawn moves reaching the last rank.
    """

    from_sq: Optional[int]
    to_sq: int
    promotion: Optional[int] = None
    drop: Optional[int] = None

    @property
    def is_drop(self) -> bool:
        return self.drop is not None

    def uci(self) -> str:
        if self.drop is not None:
            return PIECE_CHARS[self.drop] + "@" + square_name(self.to_sq)
        text = square_name(self.from_sq) + square_name(self.to_sq)
        if self.promotion is not None:
            text += PIECE_CHARS[self.promotion].lower()
        return text

    def __repr__(self) -> str:
        return f"Move({self.uci()!r})"


def parse_move_uci(text: str) -> Move:
    """Parse UCI move text (``e2e4``, ``e7e8q``, ``N@e6``)."""
    text = text.strip()
    if "@" in text:
        piece_char, _, target = text.partition("@")
        if len(piece_char) != 1 or piece_char.upper() not in "PNBRQ":
            raise ValueError(f"bad drop piece in {text!r}")
        return Move(None, parse_square(target), drop=PIECE_CHARS.index(piece_char.upper()))
    if len(text) not in (4, 5):
        raise ValueError(f"bad move {text!r}")
    from_sq = parse_square(text[0:2])
    to_sq = parse_square(text[2:4])
    promotion = None
    if len(text) == 5:
        promo_char = text[4].upper()
        if promo_char not in "NBRQ":
            raise ValueError(f"bad promotion in {text!r}")
        promotion = PIECE_CHARS.index(promo_char)
    return Move(from_sq, to_sq, promotion)


# ---------------------------------------------------------------------------
# Outcome
# ---------------------------------------------------------------------------

CHECKMATE = "checkmate"
STALEMATE = "stalemate"
THREEFOLD = "threefold-repetition"
FIFTY_MOVE = "fifty-move"


@dataclass(frozen=True, slots=True)
class Outcome:
    """Terminal result from the perspective of the side to move.

    ``value`` is -1 for a loss (checkmate), 0 for any draw. A win for the
    side to move cannot arise in chess-like games but the field admits +1
    for symmetry with search backups.
    """

    value: int
    reason: str


# ---------------------------------------------------------------------------
# GameState
# ---------------------------------------------------------------------------

_CASTLE_CLEAR = [15] * 64
_CASTLE_CLEAR[square(4, 0)] = 15 - (W_KS | W_QS)
_CASTLE_CLEAR[square(0, 0)] = 15 - W_QS
_CASTLE_CLEAR[square(7, 0)] = 15 - W_KS
_CASTLE_CLEAR[square(4, 7)] = 15 - (B_KS | B_QS)
_CASTLE_CLEAR[square(0, 7)] = 15 - B_QS
_CASTLE_CLEAR[square(7, 7)] = 15 - B_KS


class GameState:
    """Full crazyhouse position. Treat as immutable once constructed."""

    __slots__ = (
        "boards", "pockets", "promoted", "turn", "castling", "ep_square",
        "halfmove_clock", "fullmove_number", "history", "key",
        "occ_color", "occ_all", "_moves", "_moveset", "_in_check",
    )

    def __init__(self, boards, pockets, promoted, turn, castling, ep_square,
                 halfmove_clock, fullmove_number, history=(), key=None):
        self.boards = tuple(boards)
        self.pockets = tuple(pockets)
        self.promoted = tuple(promoted)
        self.turn = turn
        self.castling = castling
        self.ep_square = ep_square
        self.halfmove_clock = halfmove_clock
        self.fullmove_number = fullmove_number
        self.history = tuple(history)
        b = self.boards
        occ_w = b[0] | b[1] | b[2] | b[3] | b[4] | b[5]
        occ_b = b[6] | b[7] | b[8] | b[9] | b[10] | b[11]
        self.occ_color = (occ_w, occ_b)
        self.occ_all = occ_w | occ_b
        self.key = self._compute_key() if key is None else key
        self._moves = None
        self._moveset = None
        self._in_check = None

    # -- hashing -----------------------------------------------------------

    def _compute_key(self) -> int:
        key = 0
        for idx in range(12):
            piece_table = Z_PIECE[idx]
            for sq in _bits(self.boards[idx]):
                key ^= piece_table[sq]
        for color in (WHITE, BLACK):
            for sq in _bits(self.promoted[color]):
                key ^= Z_PROMOTED[color][sq]
            for piece in POCKET_PIECES:
                table = Z_POCKET[color][piece]
                for i in range(self.pockets[color * 5 + piece]):
                    key ^= table[i]
        for i in range(4):
            if self.castling & (1 << i):
                key ^= Z_CASTLING[i]
        if self.ep_square is not None:
            key ^= Z_EP_FILE[self.ep_square & 7]
        if self.turn == BLACK:
            key ^= Z_TURN
        return key

    def __eq__(self, other) -> bool:
        if not isinstance(other, GameState):
            return NotImplemented
        return (self.boards == other.boards and self.pockets == other.pockets
                and self.promoted == other.promoted and self.turn == other.turn
                and self.castling == other.castling and self.ep_square == other.ep_square
                and self.halfmove_clock == other.halfmove_clock
                and self.fullmove_number == other.fullmove_number)

    def __hash__(self) -> int:
        return self.key

    def __repr__(self) -> str:
        return f"GameState({to_fen(self)!r})"

    # -- queries -----------------------------------------------------------

    def piece_at(self, sq: int) -> Optional[tuple]:
        bb = 1 << sq
        if not self.occ_all & bb:
            return None
        for idx in range(12):
            if self.boards[idx] & bb:
                return idx // 6, idx % 6
        return None

    def king_square(self, color: int) -> int:
        return (self.boards[color * 6 + KING]).bit_length() - 1

    def pocket_count(self, color: int, piece: int) -> int:
        return self.pockets[color * 5 + piece]

    @property
    def in_check(self) -> bool:
        if self._in_check is None:
            self._in_check = bool(attackers_to(
                self, self.king_square(self.turn), self.turn ^ 1, self.occ_all))
        return self._in_check


def attackers_to(state: GameState, sq: int, color: int, occ: int, removed: int = 0) -> int:
    """Bitboard of `color` pieces attacking `sq` under occupancy `occ`.

    `removed` masks out attacker squares (used for captured pieces when
    probing hypothetical positions).
    """
    b = state.boards
    base = color * 6
    keep = ~removed
    attackers = PAWN_ATTACKS[color ^ 1][sq] & b[base + PAWN] & keep
    attackers |= KNIGHT_ATTACKS[sq] & b[base + KNIGHT] & keep
    attackers |= KING_ATTACKS[sq] & b[base + KING] & keep
    rq = (b[base + ROOK] | b[base + QUEEN]) & keep
    if rq:
        attackers |= rook_attacks(sq, occ) & rq
    bq = (b[base + BISHOP] | b[base + QUEEN]) & keep
    if bq:
        attackers |= bishop_attacks(sq, occ) & bq
    return attackers


# ---------------------------------------------------------------------------
# Move generation
# ---------------------------------------------------------------------------

def _king_safe_after(state: GameState, move: Move, king_sq: int) -> bool:
    """Would our king be safe after `move`? No full state is built."""
    us = state.turn
    them = us ^ 1
    occ = state.occ_all
    if move.drop is not None:
        return not attackers_to(state, king_sq, them, occ | (1 << move.to_sq))
    from_bb = 1 << move.from_sq
    to_bb = 1 << move.to_sq
    removed = 0
    occ2 = (occ ^ from_bb) | to_bb
    if state.occ_color[them] & to_bb:
        removed = to_bb
    elif move.to_sq == state.ep_square and state.boards[us * 6 + PAWN] & from_bb:
        cap_bb = 1 << (move.to_sq + (-8 if us == WHITE else 8))
        occ2 ^= cap_bb
        removed = cap_bb
    target = move.to_sq if from_bb & state.boards[us * 6 + KING] else king_sq
    return not attackers_to(state, target, them, occ2, removed)


def _pawn_push_moves(moves, from_sq: int, to_sq: int) -> None:
    if (1 << to_sq) & BACK_RANKS:
        for promo in (QUEEN, ROOK, BISHOP, KNIGHT):
            moves.append(Move(from_sq, to_sq, promo))
    else:
        moves.append(Move(from_sq, to_sq))


def legal_moves(state: GameState) -> list:
    """All legal crazyhouse moves; empty exactly when the position is terminal."""
    if state._moves is not None:
        return state._moves

    us = state.turn
    them = us ^ 1
    base = us * 6
    b = state.boards
    occ = state.occ_all
    occ_us = state.occ_color[us]
    occ_them = state.occ_color[them]
    king_sq = state.king_square(us)
    in_check = state.in_check

    moves: list = []
    pseudo: list = []

    # Board moves (pseudo-legal first).
    pawns = b[base + PAWN]
    if pawns:
        step = 8 if us == WHITE else -8
        empty = ~occ
        for from_sq in _bits(pawns):
            to_sq = from_sq + step
            if (1 << to_sq) & empty:
                _pawn_push_moves(pseudo, from_sq, to_sq)
                start_rank = RANK_2 if us == WHITE else RANK_7
                if (1 << from_sq) & start_rank and (1 << (to_sq + step)) & empty:
                    pseudo.append(Move(from_sq, to_sq + step))
            caps = PAWN_ATTACKS[us][from_sq] & occ_them
            for to in _bits(caps):
                _pawn_push_moves(pseudo, from_sq, to)
            if state.ep_square is not None and PAWN_ATTACKS[us][from_sq] & (1 << state.ep_square):
                pseudo.append(Move(from_sq, state.ep_square))
    for from_sq in _bits(b[base + KNIGHT]):
        for to in _bits(KNIGHT_ATTACKS[from_sq] & ~occ_us):
            pseudo.append(Move(from_sq, to))
    for from_sq in _bits(b[base + BISHOP]):
        for to in _bits(bishop_attacks(from_sq, occ) & ~occ_us):
            pseudo.append(Move(from_sq, to))
    for from_sq in _bits(b[base + ROOK]):
        for to in _bits(rook_attacks(from_sq, occ) & ~occ_us):
            pseudo.append(Move(from_sq, to))
    for from_sq in _bits(b[base + QUEEN]):
        atk = rook_attacks(from_sq, occ) | bishop_attacks(from_sq, occ)
        for to in _bits(atk & ~occ_us):
            pseudo.append(Move(from_sq, to))
    for to in _bits(KING_ATTACKS[king_sq] & ~occ_us):
        pseudo.append(Move(king_sq, to))

    # Filter board moves. Without check only king moves, en-passant and
    # moves of pieces aligned with the king can expose it.
    king_bb = 1 << king_sq
    pawn_us = b[base + PAWN]
    for move in pseudo:
        from_bb = 1 << move.from_sq
        if in_check:
            safe = _king_safe_after(state, move, king_sq)
        elif from_bb & king_bb:
            safe = _king_safe_after(state, move, king_sq)
        elif LINE[king_sq][move.from_sq]:
            safe = _king_safe_after(state, move, king_sq)
        elif move.to_sq == state.ep_square and from_bb & pawn_us:
            safe = _king_safe_after(state, move, king_sq)
        else:
            safe = True
        if safe:
            moves.append(move)

    # Castling: path squares empty, king path never attacked.
    if not in_check:
        if us == WHITE:
            rights = ((state.castling & W_KS, 4, 6, 5, 0), (state.castling & W_QS, 4, 2, 3, 1))
        else:
            rights = ((state.castling & B_KS, 60, 62, 61, 0), (state.castling & B_QS, 60, 58, 59, 57))
        for right, k_from, k_to, k_mid, q_extra in rights:
            if not right:
                continue
            path = (1 << k_mid) | (1 << k_to)
            if q_extra:
                path |= 1 << q_extra
            if occ & path:
                continue
            if attackers_to(state, k_mid, them, occ) or attackers_to(state, k_to, them, occ):
                continue
            moves.append(Move(k_from, k_to))

    # Drops: any pocket piece onto an empty square; pawns not on back ranks.
    # When not in check a drop can never expose our king; in check only
    # interpositions on the check ray help.
    if any(state.pockets[us * 5 + p] for p in POCKET_PIECES):
        if in_check:
            checkers = attackers_to(state, king_sq, them, occ)
            if checkers & (checkers - 1):
                drop_targets = 0  # double check: only king moves
            else:
                drop_targets = BETWEEN[king_sq][checkers.bit_length() - 1]
        else:
            drop_targets = ~occ & FULL_BOARD
        if drop_targets:
            for piece in POCKET_PIECES:
                if not state.pockets[us * 5 + piece]:
                    continue
                targets = drop_targets
                if piece == PAWN:
                    targets &= ~BACK_RANKS
                for to in _bits(targets):
                    moves.append(Move(None, to, drop=piece))

    state._moves = moves
    return moves


def _legal_set(state: GameState) -> frozenset:
    if state._moveset is None:
        state._moveset = frozenset(legal_moves(state))
    return state._moveset


# ---------------------------------------------------------------------------
# Applying moves
# ---------------------------------------------------------------------------

def apply_move(state: GameState, move: Move) -> GameState:
    """Return the successor position; raises IllegalMoveError otherwise.

    Captures feed the mover's pocket (promoted pieces demote to pawns),
    drops take from it. The halfmove clock resets on pawn moves, captures
    and drops; the repetition history resets with it.
    """
    if move not in _legal_set(state):
        raise IllegalMoveError(f"illegal move {move.uci()} in {to_fen(state)}")

    us = state.turn
    them = us ^ 1
    boards = list(state.boards)
    pockets = list(state.pockets)
    promoted = list(state.promoted)
    castling = state.castling
    key = state.key
    irreversible = False

    if state.ep_square is not None:
        key ^= Z_EP_FILE[state.ep_square & 7]
    ep_square = None

    if move.drop is not None:
        piece = move.drop
        to_bb = 1 << move.to_sq
        boards[us * 6 + piece] |= to_bb
        key ^= Z_PIECE[us * 6 + piece][move.to_sq]
        count = pockets[us * 5 + piece]
        pockets[us * 5 + piece] = count - 1
        key ^= Z_POCKET[us][piece][count - 1]
        irreversible = True
    else:
        from_sq, to_sq = move.from_sq, move.to_sq
        from_bb, to_bb = 1 << from_sq, 1 << to_sq
        piece = next(p for p in range(6) if boards[us * 6 + p] & from_bb)

        # Capture (including en passant).
        cap_sq = None
        if state.occ_color[them] & to_bb:
            cap_sq = to_sq
        elif piece == PAWN and to_sq == state.ep_square:
            cap_sq = to_sq + (-8 if us == WHITE else 8)
        if cap_sq is not None:
            cap_bb = 1 << cap_sq
            cap_piece = next(p for p in range(6) if boards[them * 6 + p] & cap_bb)
            boards[them * 6 + cap_piece] ^= cap_bb
            key ^= Z_PIECE[them * 6 + cap_piece][cap_sq]
            pocket_piece = cap_piece
            if promoted[them] & cap_bb:
                promoted[them] ^= cap_bb
                key ^= Z_PROMOTED[them][cap_sq]
                pocket_piece = PAWN
            count = pockets[us * 5 + pocket_piece]
            pockets[us * 5 + pocket_piece] = count + 1
            key ^= Z_POCKET[us][pocket_piece][count]
            castling &= _CASTLE_CLEAR[cap_sq]
            irreversible = True

        boards[us * 6 + piece] ^= from_bb
        key ^= Z_PIECE[us * 6 + piece][from_sq]
        if move.promotion is not None:
            boards[us * 6 + move.promotion] |= to_bb
            key ^= Z_PIECE[us * 6 + move.promotion][to_sq]
            promoted[us] |= to_bb
            key ^= Z_PROMOTED[us][to_sq]
        else:
            boards[us * 6 + piece] |= to_bb
            key ^= Z_PIECE[us * 6 + piece][to_sq]
            if promoted[us] & from_bb:
                promoted[us] ^= from_bb | to_bb
                key ^= Z_PROMOTED[us][from_sq] ^ Z_PROMOTED[us][to_sq]

        if piece == PAWN:
            irreversible = True
            if abs(to_sq - from_sq) == 16:
                ep_square = (from_sq + to_sq) // 2
                key ^= Z_EP_FILE[ep_square & 7]
        elif piece == KING and abs(to_sq - from_sq) == 2:
            rook_from = to_sq + 1 if to_sq > from_sq else to_sq - 2
            rook_to = (from_sq + to_sq) // 2
            boards[us * 6 + ROOK] ^= (1 << rook_from) | (1 << rook_to)
            key ^= Z_PIECE[us * 6 + ROOK][rook_from] ^ Z_PIECE[us * 6 + ROOK][rook_to]

        castling &= _CASTLE_CLEAR[from_sq] & _CASTLE_CLEAR[to_sq]

    for i in range(4):
        bit = 1 << i
        if (state.castling ^ castling) & bit:
            key ^= Z_CASTLING[i]
    key ^= Z_TURN

    if irreversible:
        halfmove = 0
        history = ()
    else:
        halfmove = state.halfmove_clock + 1
        history = state.history + (state.key,)

    return GameState(
        boards, pockets, promoted, them, castling, ep_square,
        halfmove, state.fullmove_number + (1 if us == BLACK else 0),
        history, key,
    )


# ---------------------------------------------------------------------------
# Outcome, checks, perft
# ---------------------------------------------------------------------------

def repetition_count(state: GameState) -> int:
    """Occurrences of the current position since the last irreversible move."""
    return 1 + state.history.count(state.key)


def outcome(state: GameState) -> Optional[Outcome]:
    """Terminal result for the side to move, or None if play continues."""
    if not legal_moves(state):
        if state.in_check:
            return Outcome(-1, CHECKMATE)
        return Outcome(0, STALEMATE)
    if state.halfmove_clock >= 100:
        return Outcome(0, FIFTY_MOVE)
    if repetition_count(state) >= 3:
        return Outcome(0, THREEFOLD)
    return None


def gives_check(state: GameState, move: Move) -> bool:
    """True iff the opponent king is attacked after `move`."""
    us = state.turn
    them = us ^ 1
    enemy_king = state.king_square(them)
    occ = state.occ_all

    if move.drop is not None:
        piece = move.drop
        to = move.to_sq
        if piece == PAWN:
            return bool(PAWN_ATTACKS[us][to] & (1 << enemy_king))
        if piece == KNIGHT:
            return bool(KNIGHT_ATTACKS[to] & (1 << enemy_king))
        occ2 = occ | (1 << to)
        if piece in (ROOK, QUEEN) and rook_attacks(to, occ2) & (1 << enemy_king):
            return True
        if piece in (BISHOP, QUEEN) and bishop_attacks(to, occ2) & (1 << enemy_king):
            return True
        return False

    from_sq, to_sq = move.from_sq, move.to_sq
    from_bb, to_bb = 1 << from_sq, 1 << to_sq
    piece = next(p for p in range(6) if state.boards[us * 6 + p] & from_bb)

    if piece == KING and abs(to_sq - from_sq) == 2:  # castling: rook may check
        return _gives_check_slow(state, move)
    if piece == PAWN and to_sq == state.ep_square:  # en passant: two squares open
        return _gives_check_slow(state, move)

    occ2 = (occ ^ from_bb) | to_bb
    moved = move.promotion if move.promotion is not None else piece
    king_bb = 1 << enemy_king
    if moved == PAWN:
        if PAWN_ATTACKS[us][to_sq] & king_bb:
            return True
    elif moved == KNIGHT:
        if KNIGHT_ATTACKS[to_sq] & king_bb:
            return True
    elif moved != KING:
        if moved in (ROOK, QUEEN) and rook_attacks(to_sq, occ2) & king_bb:
            return True
        if moved in (BISHOP, QUEEN) and bishop_attacks(to_sq, occ2) & king_bb:
            return True

    # Discovered check through the vacated square.
    if LINE[enemy_king][from_sq] and not LINE[enemy_king][from_sq] & to_bb:
        base = us * 6
        rq = (state.boards[base + ROOK] | state.boards[base + QUEEN]) & ~from_bb
        if rq and rook_attacks(enemy_king, occ2) & rq:
            return True
        bq = (state.boards[base + BISHOP] | state.boards[base + QUEEN]) & ~from_bb
        if bq and bishop_attacks(enemy_king, occ2) & bq:
            return True
    return False


def _gives_check_slow(state: GameState, move: Move) -> bool:
    child = apply_move(state, move)
    return child.in_check


def perft(state: GameState, depth: int) -> int:
    """Number of legal move sequences of exactly `depth` plies."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = legal_moves(state)
    if depth == 1:
        return len(moves)
    return sum(perft(apply_move(state, m), depth - 1) for m in moves)


def position_key(state: GameState) -> int:
    """Zobrist-style 64-bit key over board, pockets, promoted marks,
    castling, en passant and side to move."""
    return state.key


# ---------------------------------------------------------------------------
# FEN
# ---------------------------------------------------------------------------

def parse_fen(text: str) -> GameState:
    """Parse crazyhouse FEN in bracket-pocket or trailing-slash-pocket form.

    Promoted pieces may carry a ``~`` suffix. Plain FEN without a pocket
    section is accepted as empty pockets.
    """
    fields = text.split()
    if len(fields) != 6:
        raise FenError(f"expected 6 FEN fields, got {len(fields)} in {text!r}")
    placement, turn_s, castling_s, ep_s, half_s, full_s = fields

    pocket_s = ""
    if "[" in placement:
        placement, _, rest = placement.partition("[")
        if not rest.endswith("]"):
            raise FenError(f"unterminated pocket bracket in {text!r}")
        pocket_s = rest[:-1]
        if pocket_s == "-":
            pocket_s = ""
    ranks = placement.split("/")
    if len(ranks) == 9:
        pocket_s = ranks[8]
        ranks = ranks[:8]
    if len(ranks) != 8:
        raise FenError(f"expected 8 ranks, got {len(ranks)}")

    boards = [0] * 12
    promoted = [0, 0]
    for rank_idx, row in enumerate(ranks):
        rank = 7 - rank_idx
        file = 0
        i = 0
        while i < len(row):
            ch = row[i]
            if ch.isdigit():
                file += int(ch)
                i += 1
                continue
            if file > 7:
                raise FenError(f"rank overflow in {row!r}")
            upper = ch.upper()
            if upper not in PIECE_CHARS:
                raise FenError(f"bad piece char {ch!r}")
            color = WHITE if ch.isupper() else BLACK
            piece = PIECE_CHARS.index(upper)
            sq = square(file, rank)
            boards[color * 6 + piece] |= 1 << sq
            i += 1
            if i < len(row) and row[i] == "~":
                if piece in (PAWN, KING):
                    raise FenError(f"promotion mark on {ch!r}")
                promoted[color] |= 1 << sq
                i += 1
            file += 1
        if file != 8:
            raise FenError(f"rank {row!r} does not sum to 8 squares")

    pockets = [0] * 10
    for ch in pocket_s:
        if ch.upper() not in "PNBRQ":
            raise FenError(f"bad pocket char {ch!r}")
        color = WHITE if ch.isupper() else BLACK
        pockets[color * 5 + PIECE_CHARS.index(ch.upper())] += 1

    if turn_s not in ("w", "b"):
        raise FenError(f"bad side to move {turn_s!r}")
    turn = WHITE if turn_s == "w" else BLACK

    castling = 0
    if castling_s != "-":
        for ch in castling_s:
            try:
                castling |= {"K": W_KS, "Q": W_QS, "k": B_KS, "q": B_QS}[ch]
            except KeyError:
                raise FenError(f"bad castling char {ch!r}") from None

    ep_square = None
    if ep_s != "-":
        try:
            ep_square = parse_square(ep_s)
        except ValueError:
            raise FenError(f"bad en-passant square {ep_s!r}") from None

    try:
        halfmove = int(half_s)
        fullmove = int(full_s)
    except ValueError:
        raise FenError(f"bad move counters {half_s!r} {full_s!r}") from None
    if halfmove < 0 or fullmove < 1:
        raise FenError(f"bad move counters {half_s!r} {full_s!r}")

    for color in (WHITE, BLACK):
        kings = boards[color * 6 + KING].bit_count()
        if kings != 1:
            raise FenError(f"{kings} kings for {'white' if color == WHITE else 'black'}")
        if boards[color * 6 + PAWN] & BACK_RANKS:
            raise FenError("pawn on back rank")

    return GameState(boards, pockets, promoted, turn, castling, ep_square,
                     halfmove, fullmove)


def to_fen(state: GameState) -> str:
    """Canonical bracket-pocket FEN; promoted pieces carry ``~``."""
    rows = []
    for rank in range(7, -1, -1):
        row = ""
        empty = 0
        for file in range(8):
            sq = square(file, rank)
            located = state.piece_at(sq)
            if located is None:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            color, piece = located
            ch = PIECE_CHARS[piece]
            row += ch if color == WHITE else ch.lower()
            if state.promoted[color] & (1 << sq):
                row += "~"
        if empty:
            row += str(empty)
        rows.append(row)

    pocket = ""
    for color in (WHITE, BLACK):
        chars = []
        for piece in POCKET_PIECES:
            ch = PIECE_CHARS[piece] if color == WHITE else PIECE_CHARS[piece].lower()
            chars.extend(ch * state.pockets[color * 5 + piece])
        pocket += "".join(sorted(chars))

    castling = "".join(ch for ch, bit in zip("KQkq", (W_KS, W_QS, B_KS, B_QS))
                       if state.castling & bit) or "-"
    ep = square_name(state.ep_square) if state.ep_square is not None else "-"
    return (f"{'/'.join(rows)}[{pocket}] {'w' if state.turn == WHITE else 'b'} "
            f"{castling} {ep} {state.halfmove_clock} {state.fullmove_number}")


def initial_state() -> GameState:
    return parse_fen(STARTING_FEN)


def color_swapped(state: GameState) -> GameState:
    """Rank-mirrored position with colors, pockets and rights swapped.

    The repetition history is dropped (keys are not transformable).
    """
    boards = [0] * 12
    promoted = [0, 0]
    for color in (WHITE, BLACK):
        for piece in range(6):
            for sq in _bits(state.boards[color * 6 + piece]):
                boards[(color ^ 1) * 6 + piece] |= 1 << (sq ^ 56)
        for sq in _bits(state.promoted[color]):
            promoted[color ^ 1] |= 1 << (sq ^ 56)
    pockets = list(state.pockets[5:]) + list(state.pockets[:5])
    castling = ((state.castling & 3) << 2) | ((state.castling >> 2) & 3)
    ep = state.ep_square ^ 56 if state.ep_square is not None else None
    return GameState(boards, pockets, promoted, state.turn ^ 1, castling, ep,
                     state.halfmove_clock, state.fullmove_number)


# ---------------------------------------------------------------------------
# SAN
# ---------------------------------------------------------------------------

def parse_san(state: GameState, text: str) -> Move:
    """Resolve a SAN token (including ``@`` drops) against the legal moves."""
    token = text.strip().rstrip("!?")
    while token and token[-1] in "+#":
        token = token[:-1]
    if not token:
        raise SanError(f"empty SAN {text!r}")
    moves = legal_moves(state)

    if token in ("O-O", "0-0", "O-O-O", "0-0-0"):
        king_sq = state.king_square(state.turn)
        delta = 2 if token in ("O-O", "0-0") else -2
        for m in moves:
            if m.from_sq == king_sq and m.drop is None and m.to_sq == king_sq + delta \
                    and state.boards[state.turn * 6 + KING] & (1 << king_sq):
                return m
        raise SanError(f"illegal castling {text!r}")

    if "@" in token:
        piece_char, _, target = token.partition("@")
        piece = PIECE_CHARS.index(piece_char.upper()) if piece_char else PAWN
        to_sq = parse_square(target)
        for m in moves:
            if m.drop == piece and m.to_sq == to_sq:
                return m
        raise SanError(f"illegal drop {text!r}")

    promotion = None
    if "=" in token:
        token, _, promo_char = token.partition("=")
        if promo_char not in "NBRQ":
            raise SanError(f"bad promotion in {text!r}")
        promotion = PIECE_CHARS.index(promo_char)

    if token[0] in "NBRQK":
        piece = PIECE_CHARS.index(token[0])
        body = token[1:]
    else:
        piece = PAWN
        body = token
    body = body.replace("x", "")
    if len(body) < 2:
        raise SanError(f"bad SAN {text!r}")
    to_sq = parse_square(body[-2:])
    hint = body[:-2]
    from_file = from_rank = None
    for ch in hint:
        if ch in FILE_NAMES:
            from_file = FILE_NAMES.index(ch)
        elif ch in RANK_NAMES:
            from_rank = RANK_NAMES.index(ch)
        else:
            raise SanError(f"bad disambiguation {text!r}")

    piece_bb = state.boards[state.turn * 6 + piece]
    matches = []
    for m in moves:
        if m.drop is not None or m.to_sq != to_sq or m.promotion != promotion:
            continue
        if not piece_bb & (1 << m.from_sq):
            continue
        if from_file is not None and m.from_sq & 7 != from_file:
            continue
        if from_rank is not None and m.from_sq >> 3 != from_rank:
            continue
        matches.append(m)
    if len(matches) != 1:
        raise SanError(f"SAN {text!r} matches {len(matches)} moves in {to_fen(state)}")
    return matches[0]


def to_san(state: GameState, move: Move) -> str:
    """SAN for a legal move, with minimal disambiguation and +/# suffix."""
    if move not in _legal_set(state):
        raise IllegalMoveError(f"illegal move {move.uci()}")
    if move.drop is not None:
        text = PIECE_CHARS[move.drop] + "@" + square_name(move.to_sq)
    else:
        color, piece = state.piece_at(move.from_sq)
        capture = (state.occ_color[state.turn ^ 1] & (1 << move.to_sq)) or \
            (piece == PAWN and move.to_sq == state.ep_square)
        if piece == KING and abs(move.to_sq - move.from_sq) == 2:
            text = "O-O" if move.to_sq > move.from_sq else "O-O-O"
        elif piece == PAWN:
            text = ""
            if capture:
                text += FILE_NAMES[move.from_sq & 7] + "x"
            text += square_name(move.to_sq)
            if move.promotion is not None:
                text += "=" + PIECE_CHARS[move.promotion]
        else:
            others = [m for m in legal_moves(state)
                      if m.drop is None and m.to_sq == move.to_sq
                      and m.from_sq != move.from_sq
                      and state.boards[state.turn * 6 + piece] & (1 << m.from_sq)]
            text = PIECE_CHARS[piece]
            if others:
                same_file = any(m.from_sq & 7 == move.from_sq & 7 for m in others)
                same_rank = any(m.from_sq >> 3 == move.from_sq >> 3 for m in others)
                if not same_file:
                    text += FILE_NAMES[move.from_sq & 7]
                elif not same_rank:
                    text += RANK_NAMES[move.from_sq >> 3]
                else:
                    text += square_name(move.from_sq)
            if capture:
                text += "x"
            text += square_name(move.to_sq)
    child = apply_move(state, move)
    if child.in_check:
        text += "#" if not legal_moves(child) else "+"
    return text
