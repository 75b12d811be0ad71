"""Independent brute-force crazyhouse move generator used as a test oracle.

Intentionally shares no code or representation with the package: the board
is a dict of (file, rank) coordinates to piece letters, legality filtering
makes every pseudo-legal move on a copied board and scans all enemy pieces
for king attacks. Slow and simple on purpose.
"""

from __future__ import annotations

FILES = "abcdefgh"
RANKS = "12345678"

KNIGHT_JUMPS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
KING_STEPS = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]
ROOK_DIRS = [(0, 1), (1, 0), (0, -1), (-1, 0)]
BISHOP_DIRS = [(1, 1), (1, -1), (-1, -1), (-1, 1)]


class OraclePosition:
    """Plain-data crazyhouse position parsed straight from a FEN string."""

    def __init__(self, board, pockets, white_to_move, castling, ep, promoted):
        self.board = board          # {(file, rank): letter}; upper = white
        self.pockets = pockets      # {"w": {"P": n, ...}, "b": {...}}
        self.white_to_move = white_to_move
        self.castling = castling    # subset of "KQkq"
        self.ep = ep                # (file, rank) or None
        self.promoted = promoted    # set of (file, rank)

    def copy(self):
        return OraclePosition(
            dict(self.board),
            {"w": dict(self.pockets["w"]), "b": dict(self.pockets["b"])},
            self.white_to_move, self.castling, self.ep, set(self.promoted),
        )


def parse(fen):
    fields = fen.split()
    placement = fields[0]
    pocket_text = ""
    if "[" in placement:
        placement, bracket = placement.split("[", 1)
        pocket_text = bracket.rstrip("]")
    rows = placement.split("/")
    if len(rows) == 9:
        pocket_text = rows[8]
        rows = rows[:8]
    board = {}
    promoted = set()
    for row_index, row in enumerate(rows):
        rank = 7 - row_index
        file = 0
        previous = None
        for ch in row:
            if ch.isdigit():
                file += int(ch)
                previous = None
            elif ch == "~":
                promoted.add(previous)
            else:
                board[(file, rank)] = ch
                previous = (file, rank)
                file += 1
    pockets = {"w": {}, "b": {}}
    for ch in pocket_text:
        side = "w" if ch.isupper() else "b"
        letter = ch.upper()
        pockets[side][letter] = pockets[side].get(letter, 0) + 1
    ep = None
    if fields[3] != "-":
        ep = (FILES.index(fields[3][0]), RANKS.index(fields[3][1]))
    return OraclePosition(board, pockets, fields[1] == "w", fields[2].replace("-", ""),
                          ep, promoted)


def _own(position, piece):
    return piece.isupper() == position.white_to_move


def _square_attacked_by(position, target, by_white):
    """Scan every attacker-side piece for a line or step onto target."""
    board = position.board
    for (f, r), piece in board.items():
        if piece.isupper() != by_white:
            continue
        kind = piece.upper()
        df, dr = target[0] - f, target[1] - r
        if kind == "P":
            forward = 1 if by_white else -1
            if dr == forward and abs(df) == 1:
                return True
        elif kind == "N":
            if (df, dr) in KNIGHT_JUMPS:
                return True
        elif kind == "K":
            if max(abs(df), abs(dr)) == 1:
                return True
        else:
            dirs = []
            if kind in ("R", "Q"):
                dirs += ROOK_DIRS
            if kind in ("B", "Q"):
                dirs += BISHOP_DIRS
            for dx, dy in dirs:
                x, y = f + dx, r + dy
                while 0 <= x < 8 and 0 <= y < 8:
                    if (x, y) == target:
                        return True
                    if (x, y) in board:
                        break
                    x, y = x + dx, y + dy
    return False


def _king_square(position, white):
    wanted = "K" if white else "k"
    for coords, piece in position.board.items():
        if piece == wanted:
            return coords
    raise ValueError("king missing")


def _apply(position, move):
    """Apply a pseudo-legal move tuple; returns a new position (no turn flip
    needed for the attack scan). Captures feed the mover's pocket, promoted
    victims demote to pawns."""
    pos = position.copy()
    side = "w" if pos.white_to_move else "b"
    kind, payload = move
    if kind == "drop":
        letter, target = payload
        piece = letter if pos.white_to_move else letter.lower()
        pos.board[target] = piece
        pos.pockets[side][letter] -= 1
        return pos
    source, target, promo = payload
    piece = pos.board.pop(source)

    def pocket_capture(victim_square):
        victim = pos.board.pop(victim_square)
        letter = "P" if victim_square in pos.promoted else victim.upper()
        pos.promoted.discard(victim_square)
        pos.pockets[side][letter] = pos.pockets[side].get(letter, 0) + 1

    if target in pos.board:
        pocket_capture(target)
    elif piece.upper() == "P" and target == pos.ep:
        victim_rank = target[1] - (1 if pos.white_to_move else -1)
        pocket_capture((target[0], victim_rank))
    pos.board[target] = (promo if piece.isupper() else promo.lower()) if promo else piece
    if source in pos.promoted:
        pos.promoted.discard(source)
        pos.promoted.add(target)
    if promo:
        pos.promoted.add(target)
    if piece.upper() == "K" and abs(target[0] - source[0]) == 2:
        rank = source[1]
        if target[0] == 6:
            rook = pos.board.pop((7, rank))
            pos.board[(5, rank)] = rook
        else:
            rook = pos.board.pop((0, rank))
            pos.board[(3, rank)] = rook
    return pos


def _pseudo_moves(position):
    board = position.board
    white = position.white_to_move
    moves = []
    for (f, r), piece in list(board.items()):
        if piece.isupper() != white:
            continue
        kind = piece.upper()
        if kind == "P":
            forward = 1 if white else -1
            start_rank = 1 if white else 6
            last_rank = 7 if white else 0
            one = (f, r + forward)
            if one not in board:
                if one[1] == last_rank:
                    for promo in "QRBN":
                        moves.append(("move", ((f, r), one, promo)))
                else:
                    moves.append(("move", ((f, r), one, None)))
                two = (f, r + 2 * forward)
                if r == start_rank and two not in board:
                    moves.append(("move", ((f, r), two, None)))
            for df in (-1, 1):
                target = (f + df, r + forward)
                if not (0 <= target[0] < 8 and 0 <= target[1] < 8):
                    continue
                occupant = board.get(target)
                can_capture = occupant is not None and occupant.isupper() != white
                if can_capture or target == position.ep:
                    if target[1] == last_rank:
                        for promo in "QRBN":
                            moves.append(("move", ((f, r), target, promo)))
                    else:
                        moves.append(("move", ((f, r), target, None)))
        elif kind in ("N", "K"):
            steps = KNIGHT_JUMPS if kind == "N" else KING_STEPS
            for df, dr in steps:
                target = (f + df, r + dr)
                if not (0 <= target[0] < 8 and 0 <= target[1] < 8):
                    continue
                occupant = board.get(target)
                if occupant is None or occupant.isupper() != white:
                    moves.append(("move", ((f, r), target, None)))
        else:
            dirs = []
            if kind in ("R", "Q"):
                dirs += ROOK_DIRS
            if kind in ("B", "Q"):
                dirs += BISHOP_DIRS
            for dx, dy in dirs:
                x, y = f + dx, r + dy
                while 0 <= x < 8 and 0 <= y < 8:
                    occupant = board.get((x, y))
                    if occupant is None:
                        moves.append(("move", ((f, r), (x, y), None)))
                    else:
                        if occupant.isupper() != white:
                            moves.append(("move", ((f, r), (x, y), None)))
                        break
                    x, y = x + dx, y + dy

    # Castling: rights present, squares empty, king path safe.
    rank = 0 if white else 7
    rights = position.castling
    king_at = (4, rank) if board.get((4, rank), "").upper() == "K" else None
    if king_at and not _square_attacked_by(position, king_at, not white):
        if ("K" if white else "k") in rights and board.get((7, rank), "").upper() == "R":
            if (5, rank) not in board and (6, rank) not in board:
                if not _square_attacked_by(position, (5, rank), not white) \
                        and not _square_attacked_by(position, (6, rank), not white):
                    moves.append(("move", ((4, rank), (6, rank), None)))
        if ("Q" if white else "q") in rights and board.get((0, rank), "").upper() == "R":
            if all((x, rank) not in board for x in (1, 2, 3)):
                if not _square_attacked_by(position, (3, rank), not white) \
                        and not _square_attacked_by(position, (2, rank), not white):
                    moves.append(("move", ((4, rank), (2, rank), None)))

    # Drops onto empty squares, pawns never on the first or last rank.
    side = "w" if white else "b"
    for letter, count in position.pockets[side].items():
        if count <= 0:
            continue
        for f in range(8):
            for r in range(8):
                if (f, r) in board:
                    continue
                if letter == "P" and r in (0, 7):
                    continue
                moves.append(("drop", (letter, (f, r))))
    return moves


def legal_move_set(fen):
    """Every legal move in UCI text, via full make-and-scan filtering."""
    position = parse(fen)
    legal = set()
    for move in _pseudo_moves(position):
        after = _apply(position, move)
        king = _king_square(after, position.white_to_move)
        if _square_attacked_by(after, king, not position.white_to_move):
            continue
        legal.add(_to_uci(move))
    return legal


def _to_uci(move):
    kind, payload = move
    if kind == "drop":
        letter, (f, r) = payload
        return f"{letter}@{FILES[f]}{RANKS[r]}"
    (f1, r1), (f2, r2), promo = payload
    text = f"{FILES[f1]}{RANKS[r1]}{FILES[f2]}{RANKS[r2]}"
    if promo:
        text += promo.lower()
    return text


def is_square_attacked(fen, square_text, by_white):
    """Attack oracle for gives_check style assertions."""
    position = parse(fen)
    target = (FILES.index(square_text[0]), RANKS.index(square_text[1]))
    return _square_attacked_by(position, target, by_white)


def _apply_uci(position, uci_text):
    for move in _pseudo_moves(position):
        if _to_uci(move) == uci_text:
            after = _apply(position, move)
            after.white_to_move = not position.white_to_move
            # Recompute en passant and castling rights for the child.
            after.ep = None
            kind, payload = move
            if kind == "move":
                (f1, r1), (f2, r2), _ = payload
                piece = after.board.get((f2, r2), "?").upper()
                if piece == "P" and abs(r2 - r1) == 2:
                    after.ep = (f1, (r1 + r2) // 2)
                rights = after.castling
                for coord, lost in (((4, 0), "KQ"), ((7, 0), "K"), ((0, 0), "Q"),
                                    ((4, 7), "kq"), ((7, 7), "k"), ((0, 7), "q")):
                    if (f1, r1) == coord or (f2, r2) == coord:
                        for ch in lost:
                            rights = rights.replace(ch, "")
                after.castling = rights
            return after
    raise ValueError(f"move {uci_text} not pseudo-legal")


def perft(fen, depth):
    """Exhaustive legal-sequence count on the oracle's own machinery."""
    position = parse(fen)
    return _perft_position(position, depth)


def _perft_position(position, depth):
    if depth == 0:
        return 1
    total = 0
    for move in _pseudo_moves(position):
        after = _apply(position, move)
        king = _king_square(after, position.white_to_move)
        if _square_attacked_by(after, king, not position.white_to_move):
            continue
        child = _child_position(position, move, after)
        if depth == 1:
            total += 1
        else:
            total += _perft_position(child, depth - 1)
    return total


def _child_position(parent, move, after):
    after.white_to_move = not parent.white_to_move
    after.ep = None
    kind, payload = move
    if kind == "move":
        (f1, r1), (f2, r2), _ = payload
        piece = after.board.get((f2, r2), "?").upper()
        if piece == "P" and abs(r2 - r1) == 2:
            after.ep = (f1, (r1 + r2) // 2)
        rights = after.castling
        for coord, lost in (((4, 0), "KQ"), ((7, 0), "K"), ((0, 0), "Q"),
                            ((4, 7), "kq"), ((7, 7), "k"), ((0, 7), "q")):
            if (f1, r1) == coord or (f2, r2) == coord:
                for ch in lost:
                    rights = rights.replace(ch, "")
        after.castling = rights
    return after
