"""Clock-to-move-time budgeting with early-stop and extension rules.

Sudden-death games assume a total length of 50 moves and switch to a
proportional 5%-of-remaining allocation from move 40 on; 70% of any
increment is added in all modes. Easy positions (one overwhelming prior
that also leads on Q) stop at half the allocated time, critical positions
(evaluation dropped at least 0.1 against the previous move) extend once
by half of it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

ASSUMED_GAME_LENGTH = 50
PROPORTIONAL_FROM_MOVE = 40
PROPORTIONAL_FRACTION = 0.05
INCREMENT_FRACTION = 0.7
SAFETY_MARGIN_MS = 50.0
HARD_CAP_FACTOR = 3.0
EASY_PRIOR_THRESHOLD = 0.9
CRITICAL_Q_DROP = 0.1
VARIETY_SPAN = 0.1


@dataclass(frozen=True)
class ClockState:
    """Remaining clock for the side to move, in milliseconds."""

    remaining_ms: float
    increment_ms: float = 0.0
    moves_to_go: Optional[int] = None
    move_number: int = 1
    fixed_move_time_ms: Optional[float] = None
    human_variety: bool = False

    def __post_init__(self):
        if self.remaining_ms < 0:
            raise ValueError("remaining time must be >= 0")


@dataclass(frozen=True)
class MoveBudget:
    target_ms: float
    hard_cap_ms: float


def allocate(clock: ClockState, rng: Optional[random.Random] = None) -> MoveBudget:
    """Per-move time budget for the given clock state.

    The target plus one extension never exceeds the remaining time minus a
    50 ms safety margin. Human-variety mode scales the target by a uniform
    factor in [0.9, 1.1].
    """
    if clock.fixed_move_time_ms is not None:
        target = float(clock.fixed_move_time_ms)
        return MoveBudget(target, target)

    if clock.moves_to_go:
        target = clock.remaining_ms / clock.moves_to_go \
            + INCREMENT_FRACTION * clock.increment_ms
    elif clock.move_number < PROPORTIONAL_FROM_MOVE:
        target = clock.remaining_ms / (ASSUMED_GAME_LENGTH - clock.move_number) \
            + INCREMENT_FRACTION * clock.increment_ms
    else:
        target = PROPORTIONAL_FRACTION * clock.remaining_ms \
            + INCREMENT_FRACTION * clock.increment_ms

    if clock.human_variety:
        factor = (rng or random).uniform(-VARIETY_SPAN, VARIETY_SPAN)
        target *= 1.0 + factor

    # Keep target + one extension (target / 2) inside the clock.
    usable = max(0.0, clock.remaining_ms - SAFETY_MARGIN_MS)
    target = max(0.0, min(target, usable / 1.5))
    hard_cap = min(HARD_CAP_FACTOR * target, usable)
    return MoveBudget(target, hard_cap)


@dataclass(frozen=True)
class SearchSnapshot:
    """What the running search exposes to the stop rules."""

    legal_move_count: int
    elapsed_ms: float
    target_ms: float
    top_prior: float
    top_prior_is_top_q: bool


def early_stop(snapshot: SearchSnapshot) -> bool:
    """Stop right away with a single legal move, or at half time in easy
    positions (top prior above 90% that still has the best Q-value)."""
    if snapshot.legal_move_count == 1:
        return True
    return (snapshot.elapsed_ms >= snapshot.target_ms / 2
            and snapshot.top_prior > EASY_PRIOR_THRESHOLD
            and snapshot.top_prior_is_top_q)


def should_extend(previous_q: Optional[float], current_best_q: float) -> bool:
    """Extend the search once when the evaluation dropped by 0.1 or more
    against the previous move's Q-value. False without a previous search."""
    if previous_q is None:
        return False
    return current_best_q <= previous_q - CRITICAL_Q_DROP
