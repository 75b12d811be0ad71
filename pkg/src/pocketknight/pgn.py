"""PGN reading and writing with crazyhouse drop SAN support."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, TextIO, Tuple, Union

from pocketknight import rules

_TAG_RE = re.compile(r'^\[(\w+)\s+"(.*)"\]\s*$')
_MOVE_NUMBER_RE = re.compile(r"^\d+\.(\.\.)?$")
_RESULTS = ("1-0", "0-1", "1/2-1/2", "*")


class PgnError(ValueError):
    """Raised on PGN that cannot be parsed or replayed."""


@dataclass
class GameRecord:
    """One PGN game: tag pairs plus SAN tokens with optional comments."""

    headers: dict = field(default_factory=dict)
    moves: List[str] = field(default_factory=list)
    comments: List[Optional[str]] = field(default_factory=list)
    result: str = "*"

    def starting_state(self) -> rules.GameState:
        fen = self.headers.get("FEN")
        if fen:
            return rules.parse_fen(fen)
        return rules.initial_state()


def _tokenize_movetext(text: str) -> Iterator[Tuple[str, Optional[str]]]:
    """Yield (san, comment) pairs; skips numbers, NAGs and variations."""
    i = 0
    n = len(text)
    pending_san: Optional[str] = None
    pending_comment: Optional[str] = None

    def flush():
        nonlocal pending_san, pending_comment
        if pending_san is not None:
            yield pending_san, pending_comment
        pending_san = None
        pending_comment = None

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "{":
            end = text.find("}", i)
            if end < 0:
                raise PgnError("unterminated comment")
            comment = text[i + 1:end].strip()
            if pending_san is not None:
                pending_comment = comment if pending_comment is None \
                    else pending_comment + " " + comment
            i = end + 1
            continue
        if ch == ";":
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if ch == "(":
            depth = 1
            i += 1
            while i < n and depth:
                if text[i] == "(":
                    depth += 1
                elif text[i] == ")":
                    depth -= 1
                i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "{(;":
            j += 1
        token = text[i:j]
        i = j
        if token in _RESULTS or _MOVE_NUMBER_RE.match(token) or token.startswith("$"):
            continue
        yield from flush()
        pending_san = token
    yield from flush()


def read_games(source: Union[str, TextIO]) -> List[GameRecord]:
    """Parse every game from PGN text or a file-like object."""
    text = source if isinstance(source, str) else source.read()
    games: List[GameRecord] = []
    current: Optional[GameRecord] = None
    movetext_lines: List[str] = []

    def close():
        nonlocal current, movetext_lines
        if current is None:
            return
        body = "\n".join(movetext_lines)
        for san, comment in _tokenize_movetext(body):
            current.moves.append(san)
            current.comments.append(comment)
        for result in _RESULTS[:3]:
            if result in body.split():
                current.result = result
                break
        if current.headers.get("Result") and current.result == "*":
            current.result = current.headers["Result"]
        games.append(current)
        current = None
        movetext_lines = []

    for line in text.splitlines():
        tag = _TAG_RE.match(line)
        if tag:
            if current is not None and movetext_lines and any(s.strip() for s in movetext_lines):
                close()
            if current is None:
                current = GameRecord()
            current.headers[tag.group(1)] = tag.group(2)
        else:
            if current is None:
                if not line.strip():
                    continue
                current = GameRecord()
            movetext_lines.append(line)
    close()
    return games


def read_games_file(path) -> List[GameRecord]:
    with open(path, "r", encoding="utf-8", errors="replace") as handle:
        return read_games(handle)


def replay(record: GameRecord) -> List[Tuple[rules.GameState, rules.Move]]:
    """Replay a game, returning (position, move played) pairs.

    Raises PgnError naming the failing token if any SAN move is illegal.
    """
    state = record.starting_state()
    plies = []
    for idx, san in enumerate(record.moves):
        try:
            move = rules.parse_san(state, san)
        except (rules.SanError, ValueError) as exc:
            raise PgnError(f"ply {idx + 1} ({san!r}): {exc}") from exc
        plies.append((state, move))
        state = rules.apply_move(state, move)
    return plies


def final_state(record: GameRecord) -> rules.GameState:
    plies = replay(record)
    if not plies:
        return record.starting_state()
    state, move = plies[-1]
    return rules.apply_move(state, move)


def write_game(record: GameRecord, wrap: int = 80) -> str:
    """Render a game as PGN text (Seven Tag Roster first, then extras)."""
    roster = ("Event", "Site", "Date", "Round", "White", "Black", "Result")
    lines = []
    for tag in roster:
        lines.append(f'[{tag} "{record.headers.get(tag, "?" if tag != "Result" else record.result)}"]')
    for tag, value in record.headers.items():
        if tag not in roster:
            lines.append(f'[{tag} "{value}"]')
    lines.append("")

    tokens: List[str] = []
    state = record.starting_state()
    number = state.fullmove_number
    black_first = state.turn == rules.BLACK
    for idx, san in enumerate(record.moves):
        if idx == 0 and black_first:
            tokens.append(f"{number}...")
        elif (idx + (1 if black_first else 0)) % 2 == 0:
            tokens.append(f"{number}.")
        comment = record.comments[idx] if idx < len(record.comments) else None
        tokens.append(san)
        if comment:
            tokens.append("{" + comment + "}")
        if (idx + (1 if black_first else 0)) % 2 == 1:
            number += 1
    tokens.append(record.result)

    line = ""
    for token in tokens:
        if line and len(line) + len(token) + 1 > wrap:
            lines.append(line)
            line = token
        else:
            line = token if not line else line + " " + token
    if line:
        lines.append(line)
    return "\n".join(lines) + "\n"
