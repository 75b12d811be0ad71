"""UCI protocol front-end binding rules, search and time management.

The session reads line-oriented commands, keeps at most one search
running, and answers every ``go`` with exactly one ``bestmove`` (also
after ``stop``). Unknown commands are ignored per UCI convention.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import replace
from typing import Optional, TextIO

from pocketknight import rules, timecontrol
from pocketknight.evaluator import EvaluatorSpec, load_table_evaluator
from pocketknight.search import SearchBudget, SearchConfig, Searcher, SearchResult

ENGINE_NAME = "PocketKnight"
ENGINE_AUTHOR = "PocketKnight developers"

_BOOL_OPTIONS = {
    "EnhanceChecks": "enhance_checks",
    "FixCheckmates": "fix_checkmates",
    "UScaling": "u_scaling",
    "QSelection": "q_selection",
    "QPV": "q_pv",
    "Transpositions": "transpositions",
}
_INT_OPTIONS = {
    "VirtualLoss": "virtual_loss",
    "Threads": "workers",
    "BatchSize": "batch_size",
    "TemperatureMoveCutoff": "temperature_move_cutoff",
    "Seed": "seed",
}
_FLOAT_OPTIONS = {
    "CPuctInit": "cpuct_init",
    "CPuctBase": "cpuct_base",
    "DirichletAlpha": "dirichlet_alpha",
    "DirichletMix": "dirichlet_mix",
    "QFactor": "q_factor",
    "QThreshInit": "q_thresh_init",
    "QThreshMax": "q_thresh_max",
    "QThreshBase": "q_thresh_base",
    "UMin": "u_min",
    "UInit": "u_init",
    "UBase": "u_base",
    "CheckThresh": "check_thresh",
    "CheckFactor": "check_factor",
    "Temperature": "temperature",
    "CentipawnLambda": "cp_lambda",
}


def format_score(result: SearchResult) -> str:
    if result.mate is not None:
        return f"mate {result.mate}"
    return f"cp {round(100 * result.cp)}"


def format_info(result: SearchResult) -> str:
    ms = max(1, int(result.elapsed * 1000))
    nps = int(result.nodes / result.elapsed) if result.elapsed > 0 else result.nodes
    pv = " ".join(move.uci() for move in result.pv)
    return (f"info depth {result.depth} score {format_score(result)} "
            f"nodes {result.nodes} nps {nps} time {ms} pv {pv}")


class EngineSession:
    """One engine process: current position, options, at most one search."""

    def __init__(self, input_stream: Optional[TextIO] = None,
                 output_stream: Optional[TextIO] = None,
                 config: Optional[SearchConfig] = None,
                 evaluator: Optional[EvaluatorSpec] = None):
        self.input = input_stream or sys.stdin
        self.output = output_stream or sys.stdout
        self.config = config or SearchConfig()
        self.evaluator = evaluator or EvaluatorSpec()
        self.state = rules.initial_state()
        self.searcher: Optional[Searcher] = None
        self.previous_q: Optional[float] = None
        self._out_lock = threading.Lock()
        self._stop_event = threading.Event()
        self._search_thread: Optional[threading.Thread] = None

    # -- plumbing ------------------------------------------------------------

    def _send(self, line: str) -> None:
        with self._out_lock:
            self.output.write(line + "\n")
            self.output.flush()

    def _error(self, message: str) -> None:
        self._send(f"info string error {message}")

    def _searcher_for_go(self) -> Searcher:
        if self.searcher is None:
            self.searcher = Searcher(self.config, self.evaluator)
        return self.searcher

    def _reset_search(self) -> None:
        self.searcher = None
        self.previous_q = None

    # -- command handlers ------------------------------------------------------

    def run(self) -> None:
        """Serve UCI until ``quit`` or end of input."""
        for raw in self.input:
            line = raw.strip()
            if not line:
                continue
            if not self.handle(line):
                break
        self._halt_search()

    def handle(self, line: str) -> bool:
        """Dispatch one command; returns False on quit."""
        parts = line.split()
        command = parts[0]
        if command == "uci":
            self._cmd_uci()
        elif command == "isready":
            self._send("readyok")
        elif command == "setoption":
            self._cmd_setoption(line)
        elif command == "ucinewgame":
            self._halt_search()
            self._reset_search()
            self.state = rules.initial_state()
        elif command == "position":
            self._halt_search()
            self._cmd_position(parts[1:])
        elif command == "go":
            self._cmd_go(parts[1:])
        elif command == "stop":
            self._halt_search()
        elif command == "quit":
            self._halt_search()
            return False
        # Anything else is silently ignored.
        return True

    def _cmd_uci(self) -> None:
        self._send(f"id name {ENGINE_NAME} {getattr(sys.modules.get('pocketknight'), '__version__', '')}".rstrip())
        self._send(f"id author {ENGINE_AUTHOR}")
        self._send("option name UCI_Variant type combo default crazyhouse var crazyhouse")
        self._send("option name Evaluator type combo default "
                   f"{self.evaluator.kind} var uniform var material var table")
        self._send("option name EvaluatorTable type string default <empty>")
        self._send("option name NoiseMode type combo default "
                   f"{self.config.noise_mode} var dirichlet var constant var none")
        for name, attr in _BOOL_OPTIONS.items():
            default = "true" if getattr(self.config, attr) else "false"
            self._send(f"option name {name} type check default {default}")
        for name, attr in _INT_OPTIONS.items():
            self._send(f"option name {name} type spin default "
                       f"{getattr(self.config, attr)} min 0 max 99999999")
        for name, attr in _FLOAT_OPTIONS.items():
            self._send(f"option name {name} type string default {getattr(self.config, attr)}")
        self._send("uciok")

    def _cmd_setoption(self, line: str) -> None:
        body = line.split(None, 1)[1] if " " in line else ""
        if not body.startswith("name"):
            return
        body = body[4:].strip()
        name, _, value = body.partition(" value ")
        name = name.strip()
        value = value.strip()
        try:
            if name in _BOOL_OPTIONS:
                self.config = replace(self.config,
                                      **{_BOOL_OPTIONS[name]: value.lower() in ("true", "1", "on")})
            elif name in _INT_OPTIONS:
                self.config = replace(self.config, **{_INT_OPTIONS[name]: int(value)})
            elif name in _FLOAT_OPTIONS:
                self.config = replace(self.config, **{_FLOAT_OPTIONS[name]: float(value)})
            elif name == "NoiseMode":
                self.config = replace(self.config, noise_mode=value)
            elif name == "Evaluator":
                if value in ("uniform", "material"):
                    self.evaluator = replace(self.evaluator, kind=value, table_path=None)
                elif value == "table":
                    if self.evaluator.table_path is None:
                        raise ValueError("set EvaluatorTable before Evaluator=table")
                    self.evaluator = replace(self.evaluator, kind="table")
            elif name == "EvaluatorTable":
                spec = load_table_evaluator(value, batch_size=self.evaluator.batch_size,
                                            scheme=self.evaluator.scheme)
                self.evaluator = spec
            elif name == "UCI_Variant":
                if value.lower() != "crazyhouse":
                    raise ValueError(f"unsupported variant {value!r}")
            else:
                return  # unknown options are ignored
        except (ValueError, OSError) as exc:
            self._error(str(exc))
            return
        self._reset_search()

    def _cmd_position(self, args) -> None:
        if not args:
            self._error("position needs startpos or fen")
            return
        try:
            if args[0] == "startpos":
                state = rules.initial_state()
                rest = args[1:]
            elif args[0] == "fen":
                try:
                    moves_at = args.index("moves")
                    fen_parts, rest = args[1:moves_at], args[moves_at:]
                except ValueError:
                    fen_parts, rest = args[1:], []
                state = rules.parse_fen(" ".join(fen_parts))
            else:
                self._error(f"bad position mode {args[0]!r}")
                return
            if rest and rest[0] == "moves":
                for text in rest[1:]:
                    move = rules.parse_move_uci(text)
                    state = rules.apply_move(state, move)
        except (ValueError, rules.IllegalMoveError) as exc:
            self._error(str(exc))
            return
        self.state = state

    def _parse_go(self, args) -> Optional[SearchBudget]:
        params = {}
        i = 0
        while i < len(args):
            key = args[i]
            if key in ("wtime", "btime", "winc", "binc", "movestogo", "movetime", "nodes"):
                if i + 1 >= len(args):
                    return None
                params[key] = int(args[i + 1])
                i += 2
            elif key == "infinite":
                params["infinite"] = True
                i += 1
            else:
                i += 1

        if "nodes" in params:
            return SearchBudget(node_limit=params["nodes"])
        if "movetime" in params:
            seconds = params["movetime"] / 1000.0
            return SearchBudget(time_limit=max(0.001, seconds * 0.97),
                                hard_cap=seconds, allow_early_stop=False)
        if "infinite" in params:
            return SearchBudget(node_limit=10 ** 12, allow_early_stop=False)
        my_time = params.get("wtime" if self.state.turn == rules.WHITE else "btime")
        my_inc = params.get("winc" if self.state.turn == rules.WHITE else "binc", 0)
        if my_time is not None:
            clock = timecontrol.ClockState(
                remaining_ms=my_time, increment_ms=my_inc,
                moves_to_go=params.get("movestogo"),
                move_number=self.state.fullmove_number)
            budget = timecontrol.allocate(clock)
            return SearchBudget(time_limit=max(0.001, budget.target_ms / 1000.0),
                                hard_cap=max(0.002, budget.hard_cap_ms / 1000.0),
                                previous_q=self.previous_q)
        return SearchBudget(node_limit=800)

    def _cmd_go(self, args) -> None:
        self._halt_search()
        if rules.outcome(self.state) is not None:
            self._send("bestmove (none)")
            return
        budget = self._parse_go(args)
        if budget is None:
            self._error("malformed go command")
            self._send("bestmove (none)")
            return
        self._stop_event = threading.Event()
        searcher = self._searcher_for_go()
        state = self.state

        def run_search_thread():
            result = searcher.search(state, budget, stop_event=self._stop_event,
                                     info=lambda res: self._send(format_info(res)))
            self.previous_q = result.q
            self._send(format_info(result))
            self._send(f"bestmove {result.move.uci()}")

        self._search_thread = threading.Thread(target=run_search_thread)
        self._search_thread.start()

    def _halt_search(self) -> None:
        """Stop any running search and wait for its bestmove emission."""
        thread = self._search_thread
        if thread is not None and thread.is_alive():
            self._stop_event.set()
            thread.join()
        self._search_thread = None


def run_session(input_stream: Optional[TextIO] = None,
                output_stream: Optional[TextIO] = None,
                config: Optional[SearchConfig] = None,
                evaluator: Optional[EvaluatorSpec] = None) -> None:
    """Serve the UCI protocol over the given streams (stdin/stdout default)."""
    EngineSession(input_stream, output_stream, config, evaluator).run()
