"""Self-play match harness with Elo estimation.

Two search configurations play openings from a suite, each opening an even
number of times with colors alternating. Games run to a terminal position
(no resign threshold), are recorded as PGN with per-move evaluation
comments in ``{<pawns>/<depth> <time>s}`` form, and aggregate into win /
draw / loss counts with a logistic Elo difference estimate.
"""

from __future__ import annotations

import concurrent.futures
import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

from pocketknight import pgn, rules
from pocketknight.evaluator import EvaluatorSpec
from pocketknight.search import SearchBudget, SearchConfig, Searcher

Opening = Union[str, pgn.GameRecord]  # FEN string or a PGN opening line

INF_ELO = float("inf")


@dataclass
class MatchSpec:
    """Pairing of two configurations over an opening suite."""

    config_a: SearchConfig
    config_b: SearchConfig
    openings: Sequence[Opening]
    games_per_opening: int = 2
    node_limit: Optional[int] = 800
    move_time: Optional[float] = None
    node_limit_b: Optional[int] = None  # defaults to side A's budget
    move_time_b: Optional[float] = None
    evaluator: EvaluatorSpec = field(default_factory=lambda: EvaluatorSpec(kind="material"))
    evaluator_b: Optional[EvaluatorSpec] = None
    event: str = "PocketKnight match"
    max_plies: int = 2000
    parallel: int = 1

    def __post_init__(self):
        if self.games_per_opening % 2:
            raise ValueError("games per opening must be even (colors swap)")
        if not self.openings:
            raise ValueError("need at least one opening")
        if self.node_limit is None and self.move_time is None:
            raise ValueError("need a node or time budget per move")
        if self.node_limit_b is None and self.move_time_b is None:
            self.node_limit_b = self.node_limit
            self.move_time_b = self.move_time


@dataclass
class GamePlayed:
    record: pgn.GameRecord
    score_a: float  # 1 win, 0.5 draw, 0 loss from A's side
    a_is_white: bool
    plies: int


@dataclass
class MatchResult:
    wins: int
    losses: int
    draws: int
    games: List[GamePlayed]
    elo: float
    elo_margin: float
    win_avg_ply_count: Optional[float]
    loss_avg_ply_count: Optional[float]

    @property
    def total(self) -> int:
        return self.wins + self.losses + self.draws


def elo_diff(wins: int, losses: int, draws: int) -> float:
    """Logistic Elo difference from a score fraction; +-inf on sweeps."""
    total = wins + losses + draws
    if total <= 0:
        raise ValueError("no games")
    score = (wins + draws / 2.0) / total
    if score <= 0.0:
        return -INF_ELO
    if score >= 1.0:
        return INF_ELO
    return -400.0 * math.log10(1.0 / score - 1.0)


def elo_margin(wins: int, losses: int, draws: int) -> float:
    """Approximate 95% margin: 1.96 * |dElo/ds| * SE(score).

    The per-game score variance comes from the W/D/L multinomial. This is
    an approximation to the reference tables' printed margins, which follow
    an unstated convention; only the point estimate is contract-tested.
    """
    total = wins + losses + draws
    if total <= 0:
        raise ValueError("no games")
    score = (wins + draws / 2.0) / total
    if score <= 0.0 or score >= 1.0:
        return INF_ELO
    variance = (wins * (1 - score) ** 2 + draws * (0.5 - score) ** 2
                + losses * (0 - score) ** 2) / total
    se = math.sqrt(variance / total)
    gradient = 400.0 / (math.log(10.0) * score * (1.0 - score))
    return 1.96 * gradient * se


def _opening_record(opening: Opening) -> Tuple[rules.GameState, List[str], Optional[str]]:
    """Resolve an opening into (start state after book moves, SANs, FEN tag)."""
    if isinstance(opening, pgn.GameRecord):
        state = opening.starting_state()
        sans = []
        for san in opening.moves:
            move = rules.parse_san(state, san)
            sans.append(san)
            state = rules.apply_move(state, move)
        fen_tag = opening.headers.get("FEN")
        return state, sans, fen_tag
    state = rules.parse_fen(opening)
    return state, [], opening


def _comment_for(result) -> str:
    if result.mate is not None:
        score = f"+M{result.mate}" if result.mate > 0 else f"-M{-result.mate}"
    else:
        score = f"{result.cp:+.2f}"
    return f"{score}/{result.depth} {result.elapsed:.3g}s"


def _budget_for(node_limit: Optional[int], move_time: Optional[float]) -> SearchBudget:
    if node_limit:
        return SearchBudget(node_limit=node_limit)
    return SearchBudget(time_limit=move_time, hard_cap=2 * move_time)


def play_game(opening: Opening, white_config: SearchConfig, black_config: SearchConfig,
              white_eval: EvaluatorSpec, black_eval: EvaluatorSpec,
              white_budget: SearchBudget, black_budget: SearchBudget,
              max_plies: int = 2000, event: str = "PocketKnight match",
              round_tag: str = "1", white_name: str = "A", black_name: str = "B",
              ) -> Tuple[float, pgn.GameRecord]:
    """Play one game to its terminal position; returns (white score, record)."""
    state, sans, fen_tag = _opening_record(opening)
    comments: List[Optional[str]] = ["book"] * len(sans)
    sans = list(sans)
    searchers = {
        rules.WHITE: Searcher(white_config, white_eval),
        rules.BLACK: Searcher(black_config, black_eval),
    }
    budgets = {rules.WHITE: white_budget, rules.BLACK: black_budget}

    plies = 0
    out = rules.outcome(state)
    while out is None and plies < max_plies:
        result = searchers[state.turn].search(state, budgets[state.turn])
        sans.append(rules.to_san(state, result.move))
        comments.append(_comment_for(result))
        state = rules.apply_move(state, result.move)
        plies += 1
        out = rules.outcome(state)

    if out is None:  # safety cap reached; adjudicate as draw
        result_tag = "1/2-1/2"
        white_score = 0.5
    elif out.value == 0:
        result_tag = "1/2-1/2"
        white_score = 0.5
    else:  # side to move is checkmated
        white_score = 0.0 if state.turn == rules.WHITE else 1.0
        result_tag = "0-1" if white_score == 0.0 else "1-0"

    def tc_tag(budget: SearchBudget) -> str:
        if budget.node_limit is not None:
            return f"nodes={budget.node_limit}"
        return f"{budget.time_limit:g}s/move"

    headers = {
        "Event": event,
        "Site": "local",
        "Date": time.strftime("%Y.%m.%d"),
        "Round": round_tag,
        "White": white_name,
        "Black": black_name,
        "Result": result_tag,
        "Variant": "crazyhouse",
        "TimeControl": f"{tc_tag(white_budget)}|{tc_tag(black_budget)}",
        "PlyCount": str(len(sans)),
    }
    if fen_tag:
        headers["FEN"] = fen_tag
        headers["SetUp"] = "1"
    record = pgn.GameRecord(headers=headers, moves=sans, comments=comments,
                            result=result_tag)
    return white_score, record


def _game_task(args) -> Tuple[float, pgn.GameRecord, bool, int]:
    (opening, a_white, spec_a, spec_b, eval_a, eval_b, budget_a, budget_b,
     max_plies, event, round_tag) = args
    if a_white:
        white_cfg, black_cfg = spec_a, spec_b
        white_eval, black_eval = eval_a, eval_b
        white_budget, black_budget = budget_a, budget_b
        white_name, black_name = "A", "B"
    else:
        white_cfg, black_cfg = spec_b, spec_a
        white_eval, black_eval = eval_b, eval_a
        white_budget, black_budget = budget_b, budget_a
        white_name, black_name = "B", "A"
    white_score, record = play_game(
        opening, white_cfg, black_cfg, white_eval, black_eval,
        white_budget, black_budget, max_plies, event, round_tag,
        white_name, black_name)
    score_a = white_score if a_white else 1.0 - white_score
    return score_a, record, a_white, len(record.moves)


def play_match(spec: MatchSpec) -> MatchResult:
    """Run the full pairing, optionally with games in parallel processes."""
    eval_a = spec.evaluator
    eval_b = spec.evaluator_b or spec.evaluator

    tasks = []
    game_no = 0
    for opening_idx, opening in enumerate(spec.openings):
        if isinstance(opening, str):
            try:
                rules.parse_fen(opening)
            except rules.FenError as exc:
                raise ValueError(f"opening {opening_idx} failed to parse: {exc}") from exc
        else:
            try:
                _opening_record(opening)
            except (rules.SanError, rules.FenError, rules.IllegalMoveError) as exc:
                raise ValueError(f"opening {opening_idx} failed to parse: {exc}") from exc
        for repeat in range(spec.games_per_opening):
            game_no += 1
            a_white = repeat % 2 == 0
            config_a = replace(spec.config_a, seed=spec.config_a.seed + game_no)
            config_b = replace(spec.config_b, seed=spec.config_b.seed + game_no)
            tasks.append((opening, a_white, config_a, config_b, eval_a, eval_b,
                          _budget_for(spec.node_limit, spec.move_time),
                          _budget_for(spec.node_limit_b, spec.move_time_b),
                          spec.max_plies, spec.event, str(game_no)))

    if spec.parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.parallel) as pool:
            outcomes = list(pool.map(_game_task, tasks))
    else:
        outcomes = [_game_task(task) for task in tasks]

    wins = losses = draws = 0
    games: List[GamePlayed] = []
    for score_a, record, a_white, plies in outcomes:
        if score_a == 1.0:
            wins += 1
        elif score_a == 0.0:
            losses += 1
        else:
            draws += 1
        games.append(GamePlayed(record=record, score_a=score_a,
                                a_is_white=a_white, plies=plies))

    win_plies = [g.plies for g in games if g.score_a == 1.0]
    loss_plies = [g.plies for g in games if g.score_a == 0.0]
    return MatchResult(
        wins=wins, losses=losses, draws=draws, games=games,
        elo=elo_diff(wins, losses, draws),
        elo_margin=elo_margin(wins, losses, draws),
        win_avg_ply_count=sum(win_plies) / len(win_plies) if win_plies else None,
        loss_avg_ply_count=sum(loss_plies) / len(loss_plies) if loss_plies else None,
    )


def summary_lines(result: MatchResult) -> List[str]:
    score = (result.wins + result.draws / 2) / result.total if result.total else 0.0
    lines = [
        f"games {result.total}",
        f"wins {result.wins} losses {result.losses} draws {result.draws}",
        f"score {100 * score:.1f}%",
        f"elo {result.elo:+.2f} +/- {result.elo_margin:.2f}",
    ]
    if result.win_avg_ply_count is not None:
        lines.append(f"wapc {result.win_avg_ply_count:.1f}")
    if result.loss_avg_ply_count is not None:
        lines.append(f"lapc {result.loss_avg_ply_count:.1f}")
    return lines


def write_table(result: MatchResult, path) -> None:
    """Machine-readable per-game table plus the aggregate row (TSV)."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("game\twhite\tscore_a\tplies\tresult\n")
        for i, game in enumerate(result.games, start=1):
            handle.write(f"{i}\t{'A' if game.a_is_white else 'B'}\t"
                         f"{game.score_a}\t{game.plies}\t{game.record.result}\n")
        handle.write(f"total\t-\t{result.wins}+{result.draws}={result.losses}-\t"
                     f"{result.elo:+.2f}\t{result.elo_margin:.2f}\n")


def write_pgns(result: MatchResult, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for game in result.games:
            handle.write(pgn.write_game(game.record))
            handle.write("\n")


def load_openings(path) -> List[Opening]:
    """Opening suite file: PGN games, or one FEN per line."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if "[" in text and "]" in text and "Event" in text:
        return list(pgn.read_games(text))
    openings: List[Opening] = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            openings.append(line)
    return openings
