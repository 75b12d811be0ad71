"""Position evaluation contract consumed by the search.

An evaluator maps positions to ``(value, prior distribution)`` pairs. Three
built-in kinds run without any trained model:

* ``uniform``: value 0, equal prior on every legal move,
* ``material``: tanh-squashed material balance (board pieces at classic
  weights, pocket pieces at half weight) with uniform priors,
* ``table``: exact values and sparse priors loaded from a text file, with
  uniform fallback for unknown positions.

All priors are renormalized over the legal-move mask and vanish exactly on
illegal policy indices.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pocketknight import encoding, rules

_TABLE_CACHE: Dict[str, dict] = {}
_TABLE_CACHE_LOCK = threading.Lock()

# Board material weights for P, N, B, R, Q, K; pocket pieces count half.
MATERIAL_WEIGHTS = (1.0, 3.0, 3.0, 5.0, 9.0, 0.0)
POCKET_WEIGHT_FACTOR = 0.5
MATERIAL_SCALE = 0.1  # arbitrary squash rate; see module docstring


class TableFormatError(ValueError):
    """Raised on malformed table-evaluator files; names the bad line."""


@dataclass(frozen=True)
class Evaluation:
    """Value in [-1, +1] from the mover's perspective plus move priors."""

    value: float
    priors: np.ndarray = field(compare=False)


@dataclass(frozen=True)
class EvaluatorSpec:
    """Description of an evaluator; cheap to copy between workers."""

    kind: str = "uniform"
    table_path: Optional[str] = None
    batch_size: int = 8
    scheme: str = encoding.SCHEME_UCI

    def __post_init__(self):
        if self.kind not in ("uniform", "material", "table"):
            raise ValueError(f"unknown evaluator kind {self.kind!r}")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.kind == "table" and not self.table_path:
            raise ValueError("table evaluator needs a file path")


def _uniform_priors(state: rules.GameState, scheme: str) -> np.ndarray:
    mask = encoding.legal_policy_mask(state, scheme)
    priors = np.zeros(mask.shape, dtype=np.float64)
    count = int(mask.sum())
    if count:
        priors[mask] = 1.0 / count
    return priors


def material_balance(state: rules.GameState) -> float:
    """Material difference from the mover's point of view, in pawn units."""
    diff = 0.0
    for color in (rules.WHITE, rules.BLACK):
        sign = 1.0 if color == state.turn else -1.0
        for piece in range(6):
            diff += sign * MATERIAL_WEIGHTS[piece] * state.boards[color * 6 + piece].bit_count()
        for piece in rules.POCKET_PIECES:
            diff += (sign * POCKET_WEIGHT_FACTOR * MATERIAL_WEIGHTS[piece]
                     * state.pockets[color * 5 + piece])
    return diff


def _evaluate_uniform(state: rules.GameState, scheme: str) -> Evaluation:
    return Evaluation(0.0, _uniform_priors(state, scheme))


def _evaluate_material(state: rules.GameState, scheme: str) -> Evaluation:
    value = math.tanh(MATERIAL_SCALE * material_balance(state))
    return Evaluation(value, _uniform_priors(state, scheme))


def _table_key(state: rules.GameState) -> str:
    return rules.to_fen(state)


def _load_table(path: str) -> dict:
    """Parse ``FEN | value | move:prior,...`` lines; priors renormalize."""
    table = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("|")]
            if len(parts) != 3:
                raise TableFormatError(f"{path}:{lineno}: expected 'FEN | value | priors'")
            fen, value_s, priors_s = parts
            try:
                state = rules.parse_fen(fen)
            except rules.FenError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from exc
            try:
                value = float(value_s)
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: bad value {value_s!r}") from None
            if not -1.0 <= value <= 1.0:
                raise TableFormatError(f"{path}:{lineno}: value {value} outside [-1, 1]")
            entries: List[Tuple[str, float]] = []
            if priors_s:
                for item in priors_s.split(","):
                    item = item.strip()
                    if not item:
                        continue
                    move_s, colon, prior_s = item.partition(":")
                    try:
                        move = rules.parse_move_uci(move_s.strip())
                        prior = float(prior_s) if colon else 1.0
                    except ValueError as exc:
                        raise TableFormatError(f"{path}:{lineno}: bad prior {item!r}") from exc
                    if prior < 0:
                        raise TableFormatError(f"{path}:{lineno}: negative prior {item!r}")
                    entries.append((move, prior))
            table[_table_key(state)] = (value, entries)
    return table


def load_table_evaluator(path, batch_size: int = 8,
                         scheme: str = encoding.SCHEME_UCI) -> EvaluatorSpec:
    """Validate and cache a table file, returning a ready spec."""
    path = str(path)
    table = _load_table(path)
    with _TABLE_CACHE_LOCK:
        _TABLE_CACHE[path] = table
    return EvaluatorSpec(kind="table", table_path=path, batch_size=batch_size, scheme=scheme)


def _get_table(spec: EvaluatorSpec) -> dict:
    with _TABLE_CACHE_LOCK:
        table = _TABLE_CACHE.get(spec.table_path)
    if table is None:
        table = _load_table(spec.table_path)
        with _TABLE_CACHE_LOCK:
            _TABLE_CACHE[spec.table_path] = table
    return table


def _evaluate_table(state: rules.GameState, spec: EvaluatorSpec) -> Evaluation:
    entry = _get_table(spec).get(_table_key(state))
    if entry is None:
        return _evaluate_uniform(state, spec.scheme)
    value, move_priors = entry
    if not move_priors:
        return Evaluation(value, _uniform_priors(state, spec.scheme))
    priors = np.zeros(encoding.scheme_size(spec.scheme), dtype=np.float64)
    legal = rules._legal_set(state)
    for move, prior in move_priors:
        if move not in legal:
            continue
        priors[encoding.policy_index(move, state, spec.scheme)] += prior
    total = priors.sum()
    if total <= 0.0:
        return Evaluation(value, _uniform_priors(state, spec.scheme))
    priors /= total
    return Evaluation(value, priors)


def evaluate_batch(states: Sequence[rules.GameState],
                   spec: EvaluatorSpec) -> List[Evaluation]:
    """Evaluate positions one Evaluation per state.

    Deterministic for a fixed spec, and transparent under batching:
    evaluating a concatenation equals concatenating the evaluations.
    """
    if spec.kind == "uniform":
        return [_evaluate_uniform(s, spec.scheme) for s in states]
    if spec.kind == "material":
        return [_evaluate_material(s, spec.scheme) for s in states]
    return [_evaluate_table(s, spec) for s in states]


class EvaluationService:
    """Shared batching front to an evaluator.

    Workers submit position lists and block for their results. Pending
    requests flush once ``spec.batch_size`` positions have accumulated or
    a 1 ms deadline expires, whichever comes first.
    """

    FLUSH_DEADLINE = 0.001

    def __init__(self, spec: EvaluatorSpec):
        self.spec = spec
        self._lock = threading.Lock()
        self._wakeup = threading.Condition(self._lock)
        self._pending: List[tuple] = []
        self._pending_count = 0
        self._closed = False
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def submit(self, states: Sequence[rules.GameState]) -> List[Evaluation]:
        if not states:
            return []
        done = threading.Event()
        box: List[List[Evaluation]] = []
        with self._lock:
            if self._closed:
                raise RuntimeError("service closed")
            self._pending.append((states, box, done))
            self._pending_count += len(states)
            self._wakeup.notify()
        done.wait()
        return box[0]

    def _run(self):
        while True:
            with self._lock:
                if not self._pending:
                    if self._closed:
                        return
                    self._wakeup.wait()
                    continue
                deadline = time.monotonic() + self.FLUSH_DEADLINE
                while (self._pending_count < self.spec.batch_size
                       and not self._closed):
                    remaining = deadline - time.monotonic()
                    if remaining <= 0:
                        break
                    self._wakeup.wait(remaining)
                batch = self._pending
                self._pending = []
                self._pending_count = 0
            states: List[rules.GameState] = []
            for request_states, _, _ in batch:
                states.extend(request_states)
            results = evaluate_batch(states, self.spec)
            offset = 0
            for request_states, box, done in batch:
                box.append(results[offset:offset + len(request_states)])
                offset += len(request_states)
                done.set()

    def close(self):
        with self._lock:
            self._closed = True
            self._wakeup.notify()
        self._thread.join(timeout=5)
