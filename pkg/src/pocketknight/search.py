"""Modified PUCT Monte-Carlo tree search.

Rollouts select child edges by ``argmax(Q + U)`` where unvisited edges
score Q = -1, expand one new node per rollout through a batched evaluator,
and back up values negamax-style. On top of the plain PUCT loop this
implements: a visit-scaled exploration constant, Dirichlet or constant
root noise, virtual loss for concurrent workers, Q-blended final move
selection with a dynamic visit gate, principal-variation Q adjustment,
centipawn conversion, counter-aware transpositions, a shrinking U-value
divisor, prior boosts for checking moves, and an exploration cutoff once
a move to a winning terminal is known.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from pocketknight import encoding, rules, timecontrol
from pocketknight.evaluator import EvaluationService, EvaluatorSpec, evaluate_batch

NOISE_DIRICHLET = "dirichlet"
NOISE_CONSTANT = "constant"
NOISE_NONE = "none"


@dataclass
class SearchConfig:
    """Every tunable of the search; defaults follow the engine's tuning."""

    cpuct_init: float = 2.5
    cpuct_base: float = 19652.0
    dirichlet_alpha: float = 0.2
    dirichlet_mix: float = 0.25
    virtual_loss: int = 3
    q_factor: float = 0.7
    q_thresh_init: float = 0.5
    q_thresh_max: float = 0.9
    q_thresh_base: float = 1965.0
    u_min: float = 0.25
    u_init: float = 1.0
    u_base: float = 1965.0
    check_thresh: float = 0.1
    check_factor: float = 0.5
    temperature: float = 0.0
    temperature_move_cutoff: int = 0
    cp_lambda: float = 1.2
    workers: int = 1
    batch_size: int = 8
    enhance_checks: bool = True
    fix_checkmates: bool = True
    u_scaling: bool = True
    q_selection: bool = True
    q_pv: bool = True
    transpositions: bool = True
    noise_mode: str = NOISE_DIRICHLET
    seed: int = 0

    def __post_init__(self):
        positives = (
            self.cpuct_init, self.cpuct_base, self.q_thresh_init, self.q_thresh_max,
            self.q_thresh_base, self.u_min, self.u_init, self.u_base,
            self.check_thresh, self.check_factor, self.cp_lambda,
            self.dirichlet_alpha, self.virtual_loss, self.q_factor,
        )
        if any(v <= 0 for v in positives):
            raise ValueError("search constants must be positive")
        if not 0.0 <= self.dirichlet_mix <= 1.0:
            raise ValueError("dirichlet mix must lie in [0, 1]")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.workers < 1 or self.batch_size < 1:
            raise ValueError("workers and batch size must be >= 1")
        if self.noise_mode not in (NOISE_DIRICHLET, NOISE_CONSTANT, NOISE_NONE):
            raise ValueError(f"unknown noise mode {self.noise_mode!r}")

    def deterministic(self) -> "SearchConfig":
        """Single worker, batch 8, constant root noise: reproducible runs."""
        return replace(self, workers=1, batch_size=8, noise_mode=NOISE_CONSTANT)


@dataclass
class SearchBudget:
    """Either a simulation count or a time target (seconds) with controls."""

    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    hard_cap: Optional[float] = None
    previous_q: Optional[float] = None  # enables the critical-position extension
    allow_early_stop: bool = True

    def __post_init__(self):
        if self.node_limit is None and self.time_limit is None:
            raise ValueError("budget needs a node or time limit")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")


@dataclass
class SearchResult:
    """Outcome of one search call."""

    move: rules.Move
    moves: Tuple[rules.Move, ...]
    pi: np.ndarray
    q: float
    cp: Optional[float]  # pawn units; None when a forced mate is reported
    mate: Optional[int]  # signed moves-to-mate, mover's view
    pv: Tuple[rules.Move, ...]
    nodes: int
    elapsed: float

    @property
    def depth(self) -> int:
        return len(self.pv)

    def comparable(self) -> tuple:
        """Everything except wall-clock time, for determinism checks."""
        return (self.move, self.moves, self.pi.tobytes(), self.q, self.cp,
                self.mate, self.pv, self.nodes)


# ---------------------------------------------------------------------------
# Scalar schedules and conversions
# ---------------------------------------------------------------------------

def cpuct_for(total_visits: int, config: SearchConfig) -> float:
    """Exploration constant, growing logarithmically with node visits."""
    return math.log((total_visits + config.cpuct_base + 1) / config.cpuct_base) \
        + config.cpuct_init


def u_divisor_for(total_visits: int, config: SearchConfig) -> float:
    """U-value divisor decaying from u_init toward u_min over visits."""
    return config.u_min - math.exp(-total_visits / config.u_base) \
        * (config.u_min - config.u_init)


def q_thresh_for(total_visits: int, config: SearchConfig) -> float:
    """Visit-count gate fraction rising from q_thresh_init to q_thresh_max."""
    return config.q_thresh_max - math.exp(-total_visits / config.q_thresh_base) \
        * (config.q_thresh_max - config.q_thresh_init)


def value_to_cp(value: float, config: SearchConfig) -> float:
    """Convert a value in (-1, 1) to pawn units; exact +-1 is a mate score."""
    if abs(value) >= 1.0:
        raise ValueError("forced-mate values are not centipawn-convertible")
    if value == 0.0:
        return 0.0
    sign = 1.0 if value > 0 else -1.0
    return sign * (-math.log(1.0 - abs(value)) / math.log(config.cp_lambda))


# ---------------------------------------------------------------------------
# Prior adjustments
# ---------------------------------------------------------------------------

def apply_root_noise(priors: np.ndarray, config: SearchConfig,
                     rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Mix exploration noise into root priors.

    Dirichlet mode draws Dir(alpha); constant mode substitutes the uniform
    distribution for the draw, making the search reproducible.
    """
    if config.noise_mode == NOISE_NONE or len(priors) == 0:
        return priors.copy()
    if config.noise_mode == NOISE_CONSTANT:
        noise = np.full(len(priors), 1.0 / len(priors))
    else:
        if rng is None:
            rng = np.random.default_rng(config.seed)
        noise = rng.dirichlet([config.dirichlet_alpha] * len(priors))
    return (1.0 - config.dirichlet_mix) * priors + config.dirichlet_mix * noise


def enhance_checks(priors: np.ndarray, checking: np.ndarray,
                   config: SearchConfig) -> np.ndarray:
    """Boost low-prior checking moves by check_factor * max(prior), then
    renormalize. Checking moves at or above check_thresh are left alone."""
    if not checking.any():
        return priors
    boosted_mask = checking & (priors < config.check_thresh)
    if not boosted_mask.any():
        return priors
    out = priors.astype(np.float64, copy=True)
    out[boosted_mask] += config.check_factor * priors.max()
    return out / out.sum()


# ---------------------------------------------------------------------------
# Tree nodes
# ---------------------------------------------------------------------------

class SearchNode:
    """One position in the tree with per-edge statistics.

    ``N`` includes live virtual losses; once all rollouts settle the node's
    total visit count is ``1 + N.sum()`` (the 1 being its expansion visit).
    """

    __slots__ = ("state", "moves", "P", "P_raw", "N", "W", "children",
                 "terminal", "winning_child", "proven_value", "proven_dist", "value")

    def __init__(self, state: rules.GameState,
                 terminal: Optional[rules.Outcome] = None):
        self.state = state
        self.terminal = terminal
        self.moves: List[rules.Move] = []
        self.P = np.zeros(0)
        self.P_raw = np.zeros(0)
        self.N = np.zeros(0, dtype=np.int64)
        self.W = np.zeros(0)
        self.children: List[Optional["SearchNode"]] = []
        self.winning_child: Optional[int] = None
        # Checkmate terminals are proven losses for their mover; draws and
        # open positions carry no proof.
        self.proven_value: Optional[int] = \
            -1 if terminal is not None and terminal.value == -1 else None
        self.proven_dist = 0
        self.value = float(terminal.value) if terminal else 0.0

    def attach(self, moves: List[rules.Move], priors: np.ndarray, value: float):
        self.moves = moves
        self.P_raw = priors
        self.P = priors
        self.N = np.zeros(len(moves), dtype=np.int64)
        self.W = np.zeros(len(moves), dtype=np.float64)
        self.children = [None] * len(moves)
        self.value = value

    @property
    def expanded(self) -> bool:
        return len(self.moves) > 0 or self.terminal is not None

    def q_values(self) -> np.ndarray:
        return np.where(self.N > 0, self.W / np.maximum(self.N, 1), -1.0)

    def key3(self) -> tuple:
        s = self.state
        return (s.key, s.fullmove_number, s.halfmove_clock)


def register_terminal_child(node: SearchNode, edge: int, out: rules.Outcome,
                            config: SearchConfig) -> None:
    """Record a terminal child; a win for the node's mover disables all
    further exploration at the node (first winning child is kept)."""
    if out.value == -1 and config.fix_checkmates:
        if node.winning_child is None:
            node.winning_child = edge
        if node.proven_value is None:
            node.proven_value = 1
            node.proven_dist = 1


def check_tree_invariants(root: SearchNode) -> None:
    """Visit conservation and Q ranges; raises AssertionError on breach."""
    stack = [root]
    while stack:
        node = stack.pop()
        if node.terminal is not None:
            continue
        for edge, child in enumerate(node.children):
            n = int(node.N[edge])
            if n > 0:
                q = node.W[edge] / n
                assert -1.0 - 1e-9 <= q <= 1.0 + 1e-9, f"Q out of range: {q}"
            if child is None:
                continue
            if child.terminal is None and child.expanded:
                assert n == 1 + int(child.N.sum()), \
                    f"visit conservation broken: N={n} child sum={int(child.N.sum())}"
            stack.append(child)


# ---------------------------------------------------------------------------
# Final move selection
# ---------------------------------------------------------------------------

def blend_policy(visits: np.ndarray, q_values: np.ndarray, q_thresh: float,
                 config: SearchConfig, temperature: float = 0.0,
                 rng: Optional[np.random.Generator] = None,
                 ) -> Tuple[np.ndarray, int]:
    """Blend the visit distribution with gated, rescaled Q-values.

    Q-values map affinely to [0, 1] and are zeroed for edges whose visit
    count falls below ``q_thresh * max(visits)``. With temperature 0 the
    argmax wins (ties to the lowest index); otherwise the move is sampled
    from the blended distribution with the visit component sharpened by
    1/temperature.
    """
    visits = visits.astype(np.float64)
    total = visits.sum()
    if total <= 0:
        raise ValueError("no visited root move")
    if temperature > 0:
        powered = np.zeros_like(visits)
        positive = visits > 0
        logs = np.log(visits[positive]) / temperature
        powered[positive] = np.exp(logs - logs.max())
        visit_component = powered / powered.sum()
    else:
        visit_component = visits / total

    if config.q_selection:
        q_prime = (np.asarray(q_values, dtype=np.float64) + 1.0) / 2.0
        q_prime[visits < q_thresh * visits.max()] = 0.0
        scores = (1.0 - config.q_factor) * visit_component + config.q_factor * q_prime
    else:
        scores = visit_component

    pi = scores / scores.sum()
    if temperature > 0:
        if rng is None:
            rng = np.random.default_rng(config.seed)
        choice = int(rng.choice(len(pi), p=pi))
    else:
        choice = int(np.argmax(scores))
    return pi, choice


def final_policy(root: SearchNode, config: SearchConfig,
                 q_values: Optional[np.ndarray] = None,
                 temperature: float = 0.0,
                 rng: Optional[np.random.Generator] = None,
                 ) -> Tuple[np.ndarray, int]:
    """Selection distribution over root moves and the chosen edge."""
    if root.winning_child is not None:
        pi = np.zeros(len(root.moves))
        pi[root.winning_child] = 1.0
        return pi, root.winning_child
    qs = root.q_values() if q_values is None else q_values
    q_thresh = q_thresh_for(int(root.N.sum()), config)
    return blend_policy(root.N, qs, q_thresh, config, temperature, rng)


def pv_adjust_q(root: SearchNode, config: SearchConfig, plies: int = 5) -> np.ndarray:
    """Per-root-move Q lowered to the principal-variation Q at depth
    ``plies`` (or the terminal value if the line ends sooner), in the root
    mover's perspective."""
    adjusted = root.q_values().copy()
    for edge in range(len(root.moves)):
        if root.N[edge] <= 0:
            continue
        deep_q = adjusted[edge]
        node = root.children[edge]
        sign = -1.0  # child edges are stored from the opponent's view
        for _ in range(plies):
            if node is None:
                break
            if node.terminal is not None:
                deep_q = sign * node.terminal.value
                break
            if not node.expanded or not node.N.any():
                break
            _, choice = final_policy(node, config)
            deep_q = sign * (node.W[choice] / node.N[choice])
            node = node.children[choice]
            sign = -sign
        adjusted[edge] = min(adjusted[edge], deep_q)
    return adjusted


# ---------------------------------------------------------------------------
# Searcher
# ---------------------------------------------------------------------------

class Searcher:
    """Owns a search tree, its transposition table and the evaluator link.

    Reusable across successive positions of one game: when the requested
    root matches a node already in the tree (same position and counters),
    that subtree keeps its statistics.
    """

    def __init__(self, config: SearchConfig, evaluator: EvaluatorSpec,
                 service: Optional[EvaluationService] = None):
        self.config = config
        self.evaluator = evaluator
        self.root: Optional[SearchNode] = None
        self.ttable: dict = {}
        self.rng = np.random.default_rng(config.seed)
        self._lock = threading.Lock()
        self._service = service
        self._info: Optional[Callable] = None

    # -- transpositions ----------------------------------------------------

    def lookup_transposition(self, key: int, fullmove: int,
                             halfmove: int) -> Optional[SearchNode]:
        """Stored node for a position, only when the position key and both
        counters match; None when transpositions are disabled."""
        if not self.config.transpositions:
            return None
        return self.ttable.get((key, fullmove, halfmove))

    def _store_transposition(self, node: SearchNode) -> None:
        if self.config.transpositions and node.terminal is None:
            self.ttable.setdefault(node.key3(), node)

    # -- evaluation --------------------------------------------------------

    def _evaluate(self, states: Sequence[rules.GameState]):
        if self._service is not None:
            return self._service.submit(states)
        return evaluate_batch(states, self.evaluator)

    def _expand(self, node: SearchNode, evaluation) -> None:
        state = node.state
        moves = rules.legal_moves(state)
        indices = [encoding.policy_index(m, state, self.evaluator.scheme) for m in moves]
        order = sorted(range(len(moves)), key=indices.__getitem__)
        moves = [moves[i] for i in order]
        priors = np.asarray([evaluation.priors[indices[i]] for i in order], dtype=np.float64)
        total = priors.sum()
        priors = priors / total if total > 0 else np.full(len(moves), 1.0 / len(moves))
        if self.config.enhance_checks:
            checking = np.fromiter(
                (rules.gives_check(state, m) for m in moves), dtype=bool, count=len(moves))
            priors = enhance_checks(priors, checking, self.config)
        node.attach(moves, priors, evaluation.value)

    # -- tree walking ------------------------------------------------------

    def _select_leaf(self, root: SearchNode):
        """Descend to an unexpanded edge or a terminal node, applying
        virtual loss along the way. Returns (path, node) where node is the
        terminal reached, or (path, None) with path ending at the new edge."""
        config = self.config
        vloss = config.virtual_loss
        node = root
        path: List[Tuple[SearchNode, int]] = []
        while True:
            if node.terminal is not None:
                return path, node
            if node.winning_child is not None:
                edge = node.winning_child
            else:
                sum_n = int(node.N.sum())
                cp = cpuct_for(sum_n, config)
                divisor = u_divisor_for(sum_n, config) if config.u_scaling else 1.0
                u = cp * node.P * (math.sqrt(sum_n + 1) / (divisor + node.N))
                edge = int(np.argmax(node.q_values() + u))
            node.N[edge] += vloss
            node.W[edge] -= vloss
            path.append((node, edge))
            child = node.children[edge]
            if child is None or not child.expanded:
                return path, None
            node = child

    def _backprop(self, path: List[Tuple[SearchNode, int]], leaf_value: float) -> None:
        """Settle virtual losses and propagate the leaf value, alternating
        perspective each ply. ``leaf_value`` is from the leaf mover's view."""
        vloss = self.config.virtual_loss
        value = leaf_value
        for node, edge in reversed(path):
            value = -value
            node.N[edge] += 1 - vloss
            node.W[edge] += value + vloss
            if self.config.fix_checkmates:
                self._update_proven(node, edge)

    def _update_proven(self, node: SearchNode, edge: int) -> None:
        """Propagate proven game-theoretic values (mate bookkeeping)."""
        child = node.children[edge]
        if child is None or node.proven_value is not None:
            return
        if child.proven_value == -1:  # child's mover is lost: winning edge
            if node.winning_child is None:
                node.winning_child = edge
            node.proven_value = 1
            node.proven_dist = child.proven_dist + 1
        elif child.proven_value == 1:
            # Every reply winning for the opponent proves this node lost.
            if all(c is not None and c.proven_value == 1 for c in node.children):
                node.proven_value = -1
                node.proven_dist = 1 + max(c.proven_dist for c in node.children)

    def _revert_virtual(self, path: List[Tuple[SearchNode, int]]) -> None:
        vloss = self.config.virtual_loss
        for node, edge in path:
            node.N[edge] -= vloss
            node.W[edge] += vloss

    def _run_batch(self, root: SearchNode, quota: int) -> int:
        """Collect up to `quota` leaves, evaluate them, back them up.
        Returns the number of simulations completed."""
        done = 0
        pending: List[tuple] = []
        with self._lock:
            for _ in range(quota):
                path, terminal_node = self._select_leaf(root)
                if terminal_node is not None:
                    self._backprop(path, terminal_node.terminal.value)
                    done += 1
                    continue
                parent, edge = path[-1]
                child_state = rules.apply_move(parent.state, parent.moves[edge])
                out = rules.outcome(child_state)
                if out is not None:
                    child = parent.children[edge]
                    if child is None:
                        child = SearchNode(child_state, terminal=out)
                        parent.children[edge] = child
                    register_terminal_child(parent, edge, out, self.config)
                    self._backprop(path, float(out.value))
                    done += 1
                    continue
                stored = self.lookup_transposition(
                    child_state.key, child_state.fullmove_number,
                    child_state.halfmove_clock)
                if stored is not None and stored.expanded:
                    child = parent.children[edge]
                    if child is None or not child.expanded:
                        child = SearchNode(child_state)
                        child.attach(list(stored.moves), stored.P_raw.copy(),
                                     stored.value)
                        parent.children[edge] = child
                    self._backprop(path, child.value)
                    done += 1
                    continue
                pending.append((path, child_state))
        if pending:
            evaluations = self._evaluate([state for _, state in pending])
            with self._lock:
                for (path, child_state), evaluation in zip(pending, evaluations):
                    parent, edge = path[-1]
                    child = parent.children[edge]
                    if child is None or not child.expanded:
                        child = SearchNode(child_state)
                        self._expand(child, evaluation)
                        parent.children[edge] = child
                        self._store_transposition(child)
                    self._backprop(path, evaluation.value)
                    done += 1
        return done

    # -- root management ---------------------------------------------------

    def _find_subtree(self, state: rules.GameState) -> Optional[SearchNode]:
        if self.root is None:
            return None
        frontier = [self.root]
        for _ in range(3):  # the root usually advanced by one or two plies
            next_frontier = []
            for node in frontier:
                if node.state == state and node.state.history == state.history:
                    return node
                next_frontier.extend(c for c in node.children if c is not None)
            frontier = next_frontier
        return None

    def _prepare_root(self, state: rules.GameState) -> SearchNode:
        if rules.outcome(state) is not None:
            raise ValueError("cannot search a terminal position")
        node = self._find_subtree(state)
        if node is None:
            node = SearchNode(state)
        if not node.expanded:
            evaluation = self._evaluate([state])[0]
            self._expand(node, evaluation)
            self._store_transposition(node)
        node.P = apply_root_noise(node.P_raw, self.config, self.rng)
        self.root = node
        return node

    # -- search drivers ----------------------------------------------------

    def search(self, state: rules.GameState, budget: SearchBudget,
               stop_event: Optional[threading.Event] = None,
               info: Optional[Callable] = None) -> SearchResult:
        config = self.config
        start = time.monotonic()
        root = self._prepare_root(state)

        sims = 0
        single_move = len(root.moves) == 1
        target = budget.time_limit
        extension_left = budget.previous_q is not None
        counter_lock = threading.Lock()
        finished = threading.Event()
        last_info = [0.0]

        def remaining_quota() -> int:
            if budget.node_limit is not None:
                return budget.node_limit - sims
            return config.batch_size

        def should_stop() -> bool:
            nonlocal target, extension_left
            if stop_event is not None and stop_event.is_set():
                return True
            if budget.node_limit is not None and sims >= budget.node_limit:
                return True
            if single_move and sims >= 1:
                return True
            if budget.time_limit is None:
                return False
            elapsed = time.monotonic() - start
            if budget.hard_cap is not None and elapsed >= budget.hard_cap:
                return True
            if elapsed >= target:
                if extension_left and root.N.any():
                    qs = root.q_values()
                    best = int(np.argmax(root.N))
                    if timecontrol.should_extend(budget.previous_q, float(qs[best])):
                        extension_left = False
                        target = target + budget.time_limit / 2
                        return False
                return True
            if budget.allow_early_stop and root.N.any():
                top = int(np.argmax(root.P_raw))
                snapshot = timecontrol.SearchSnapshot(
                    legal_move_count=len(root.moves),
                    elapsed_ms=elapsed * 1000.0,
                    target_ms=target * 1000.0,
                    top_prior=float(root.P_raw[top]),
                    top_prior_is_top_q=top == int(np.argmax(root.q_values())),
                )
                if timecontrol.early_stop(snapshot):
                    return True
            return False

        def emit_info():
            if info is None:
                return
            now = time.monotonic()
            if now - last_info[0] < 0.5 and sims > config.batch_size:
                return
            last_info[0] = now
            if root.N.any():
                with self._lock:
                    info(self._result(root, sims, now - start, sample=False))

        def worker():
            nonlocal sims
            while True:
                with counter_lock:
                    if finished.is_set() or should_stop():
                        finished.set()
                        return
                    quota = max(1, min(config.batch_size, remaining_quota()))
                done = self._run_batch(root, quota)
                with counter_lock:
                    sims += done
                emit_info()

        if config.workers == 1:
            worker()
        else:
            threads = [threading.Thread(target=worker) for _ in range(config.workers)]
            for thread in threads:
                thread.start()
            for thread in threads:
                thread.join()

        return self._result(root, sims, time.monotonic() - start)

    # -- result construction ------------------------------------------------

    def _result(self, root: SearchNode, sims: int, elapsed: float,
                sample: bool = True) -> SearchResult:
        config = self.config
        qs = root.q_values()
        if config.q_pv:
            qs = pv_adjust_q(root, config)
        tau = config.temperature if sample else 0.0
        if tau > 0 and 0 < config.temperature_move_cutoff < root.state.fullmove_number:
            tau = 0.0
        pi, choice = final_policy(root, config, q_values=qs,
                                  temperature=tau, rng=self.rng)
        pv = self._principal_variation(root, choice)
        mate = self._mate_score(root, choice, pv)
        chosen_q = float(qs[choice])
        if mate is not None:
            cp = None
        else:
            cp = value_to_cp(max(-0.999999, min(0.999999, chosen_q)), config)
        return SearchResult(
            move=root.moves[choice], moves=tuple(root.moves), pi=pi,
            q=chosen_q, cp=cp, mate=mate, pv=tuple(pv), nodes=sims,
            elapsed=elapsed,
        )

    def _principal_variation(self, root: SearchNode, first: int,
                             cap: int = 64) -> List[rules.Move]:
        pv = [root.moves[first]]
        node = root.children[first]
        while node is not None and node.terminal is None and node.expanded \
                and node.N.any() and len(pv) < cap:
            _, choice = final_policy(node, self.config)
            pv.append(node.moves[choice])
            node = node.children[choice]
        return pv

    def _mate_score(self, root: SearchNode, choice: int,
                    pv: List[rules.Move]) -> Optional[int]:
        """Signed full-move mate distance when the line is proven terminal."""
        if root.proven_value == 1 and root.winning_child == choice:
            return (root.proven_dist + 1) // 2
        if root.proven_value == -1:
            return -((root.proven_dist + 1) // 2)
        return None


def run_search(root: rules.GameState, config: SearchConfig, budget: SearchBudget,
               evaluator: Optional[EvaluatorSpec] = None,
               searcher: Optional[Searcher] = None,
               stop_event: Optional[threading.Event] = None,
               info: Optional[Callable] = None) -> SearchResult:
    """One-shot search over a fresh tree (or a provided reusable searcher)."""
    if searcher is None:
        searcher = Searcher(config, evaluator or EvaluatorSpec())
    return searcher.search(root, budget, stop_event=stop_event, info=info)
