"""PGN-to-training-sample pipeline, sample persistence, schedule emitter.

Qualifying games (both players rated 2000 or above, regular terminations,
not aborted) turn into one sample per ply: input planes, the played move's
policy index, and the final result in {-1, 0, +1} relative to the side to
move. Samples persist in a chunked binary format (magic ``ZHS1``) and the
module also emits the one-cycle learning-rate/momentum schedule used by
external trainers.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from pocketknight import encoding, pgn, rules

MAGIC = b"ZHS1"
_HEADER = struct.Struct("<4sBBI")  # magic, scheme id, plane count, sample count
_SCHEME_IDS = {encoding.SCHEME_UCI: 1, encoding.SCHEME_MAP: 2}
_SCHEME_NAMES = {v: k for k, v in _SCHEME_IDS.items()}
_PLANE_BYTES = encoding.PLANE_COUNT * 64 * 4
_SAMPLE_STRUCT = struct.Struct("<Hb")  # policy index, value

MIN_ELO = 2000
ALLOWED_TERMINATIONS = ("checkmate", "resignation", "draw", "time forfeit")

LR_MAX = 0.35
LR_MIN = 1e-5
MOMENTUM_MAX = 0.95
MOMENTUM_MIN = 0.85
DEFAULT_WARMUP_FRACTION = 0.25


class SampleFormatError(ValueError):
    """Raised on corrupt sample files; names the failing byte offset."""


@dataclass(frozen=True)
class IngestFilter:
    """Game admission rules applied before any position is sampled."""

    min_elo: int = MIN_ELO
    allowed_terminations: Tuple[str, ...] = ALLOWED_TERMINATIONS
    exclude_aborted: bool = True

    def __post_init__(self):
        if self.min_elo < 0:
            raise ValueError("Elo threshold must be nonnegative")


@dataclass
class IngestStats:
    """Bookkeeping over an ingestion run."""

    games_seen: int = 0
    games_kept: int = 0
    samples: int = 0
    skipped: dict = field(default_factory=dict)
    elo_histogram: dict = field(default_factory=dict)  # 100-wide bins
    time_controls: dict = field(default_factory=dict)

    def skip(self, reason: str) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + 1

    def lines(self) -> List[str]:
        out = [
            f"games seen {self.games_seen}",
            f"games kept {self.games_kept}",
            f"samples {self.samples}",
        ]
        for reason in sorted(self.skipped):
            out.append(f"skipped {reason} {self.skipped[reason]}")
        for bin_low in sorted(self.elo_histogram):
            out.append(f"elo {bin_low}-{bin_low + 99} {self.elo_histogram[bin_low]}")
        for tc in sorted(self.time_controls):
            out.append(f"timecontrol {tc} {self.time_controls[tc]}")
        return out


def _game_elos(record: pgn.GameRecord) -> Optional[Tuple[int, int]]:
    try:
        return int(record.headers["WhiteElo"]), int(record.headers["BlackElo"])
    except (KeyError, ValueError):
        return None


def _termination(record: pgn.GameRecord, final: rules.GameState) -> str:
    """Classify how the game ended, merging PGN tags with the replay."""
    tag = record.headers.get("Termination", "").lower()
    if "abandon" in tag or "abort" in tag:
        return "aborted"
    if "time forfeit" in tag:
        return "time forfeit"
    if record.result == "1/2-1/2":
        return "draw"
    out = rules.outcome(final)
    if out is not None and out.reason == rules.CHECKMATE:
        return "checkmate"
    if record.result in ("1-0", "0-1"):
        return "resignation"
    return "unterminated"


def samples_from_game(record: pgn.GameRecord,
                      scheme: str = encoding.SCHEME_UCI,
                      ) -> Iterator[encoding.TrainingSample]:
    """One sample per ply of a finished game, all positions equally kept."""
    if record.result == "1-0":
        white_z = 1
    elif record.result == "0-1":
        white_z = -1
    else:
        white_z = 0
    for state, move in pgn.replay(record):
        z = white_z if state.turn == rules.WHITE else -white_z
        yield encoding.TrainingSample(
            planes=encoding.encode_planes(state).values,
            policy=encoding.policy_index(move, state, scheme),
            value=z,
            scheme=scheme,
        )


def ingest(paths: Sequence, game_filter: Optional[IngestFilter] = None,
           scheme: str = encoding.SCHEME_UCI,
           ) -> Tuple[Iterator[encoding.TrainingSample], IngestStats]:
    """Stream samples from PGN files; stats fill in as the stream drains."""
    game_filter = game_filter or IngestFilter()
    stats = IngestStats()

    def generate() -> Iterator[encoding.TrainingSample]:
        for path in paths:
            try:
                games = pgn.read_games_file(path)
            except OSError as exc:
                stats.skip(f"unreadable file {path}: {exc}")
                continue
            for record in games:
                stats.games_seen += 1
                if record.headers.get("Variant", "").lower() not in ("crazyhouse", "zh"):
                    stats.skip("wrong variant")
                    continue
                if record.result not in ("1-0", "0-1", "1/2-1/2"):
                    stats.skip("no result")
                    continue
                elos = _game_elos(record)
                if elos is None:
                    stats.skip("missing elo")
                    continue
                if min(elos) < game_filter.min_elo:
                    stats.skip("below elo threshold")
                    continue
                try:
                    final = pgn.final_state(record)
                except pgn.PgnError:
                    stats.skip("illegal moves")
                    continue
                termination = _termination(record, final)
                if game_filter.exclude_aborted and termination == "aborted":
                    stats.skip("aborted")
                    continue
                if termination not in game_filter.allowed_terminations:
                    stats.skip(f"termination {termination}")
                    continue

                stats.games_kept += 1
                for elo in elos:
                    bin_low = elo // 100 * 100
                    stats.elo_histogram[bin_low] = stats.elo_histogram.get(bin_low, 0) + 1
                tc = record.headers.get("TimeControl", "?")
                stats.time_controls[tc] = stats.time_controls.get(tc, 0) + 1
                for sample in samples_from_game(record, scheme):
                    stats.samples += 1
                    yield sample

    return generate(), stats


# ---------------------------------------------------------------------------
# Binary sample files
# ---------------------------------------------------------------------------

def write_samples(samples: Iterable[encoding.TrainingSample], path,
                  scheme: str = encoding.SCHEME_UCI) -> int:
    """Write a ZHS1 file; returns the number of samples written."""
    count = 0
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, _SCHEME_IDS[scheme], encoding.PLANE_COUNT, 0))
        for sample in samples:
            if sample.scheme != scheme:
                raise ValueError(f"sample scheme {sample.scheme} != file scheme {scheme}")
            planes = np.ascontiguousarray(sample.planes, dtype="<f4")
            handle.write(planes.tobytes())
            handle.write(_SAMPLE_STRUCT.pack(sample.policy, sample.value))
            count += 1
        handle.seek(0)
        handle.write(_HEADER.pack(MAGIC, _SCHEME_IDS[scheme], encoding.PLANE_COUNT, count))
    return count


def read_samples(path) -> List[encoding.TrainingSample]:
    """Read a ZHS1 file back; write_samples then read_samples round-trips."""
    with open(path, "rb") as handle:
        data = handle.read()
    if len(data) < _HEADER.size:
        raise SampleFormatError(f"{path}: truncated header at byte 0")
    magic, scheme_id, plane_count, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise SampleFormatError(f"{path}: bad magic {magic!r} at byte 0")
    if scheme_id not in _SCHEME_NAMES:
        raise SampleFormatError(f"{path}: unknown scheme id {scheme_id} at byte 4")
    if plane_count != encoding.PLANE_COUNT:
        raise SampleFormatError(f"{path}: plane count {plane_count} unsupported")
    scheme = _SCHEME_NAMES[scheme_id]

    samples = []
    offset = _HEADER.size
    record_size = _PLANE_BYTES + _SAMPLE_STRUCT.size
    for index in range(count):
        if offset + record_size > len(data):
            raise SampleFormatError(
                f"{path}: sample {index} truncated at byte {offset}")
        planes = np.frombuffer(
            data, dtype="<f4", count=encoding.PLANE_COUNT * 64, offset=offset,
        ).reshape(encoding.PLANE_COUNT, 8, 8).copy()
        policy, value = _SAMPLE_STRUCT.unpack_from(data, offset + _PLANE_BYTES)
        try:
            samples.append(encoding.TrainingSample(
                planes=planes, policy=policy, value=value, scheme=scheme))
        except ValueError as exc:
            raise SampleFormatError(f"{path}: sample {index} at byte {offset}: {exc}") from exc
        offset += record_size
    if offset != len(data):
        raise SampleFormatError(f"{path}: {len(data) - offset} trailing bytes at {offset}")
    return samples


# ---------------------------------------------------------------------------
# One-cycle schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchedulePoint:
    iteration: int
    learning_rate: float
    momentum: float


def one_cycle_schedule(total_iterations: int,
                       warmup_fraction: float = DEFAULT_WARMUP_FRACTION,
                       ) -> List[SchedulePoint]:
    """Linear warmup to the peak rate then a long linear cool-down.

    The learning rate rises from 1e-5 to 0.35 over the warmup and decays
    back to 1e-5; momentum mirrors it affinely between 0.95 and 0.85.
    """
    if total_iterations <= 0:
        raise ValueError("need a positive iteration count")
    if not 0.0 < warmup_fraction < 1.0:
        raise ValueError("warmup fraction must lie in (0, 1)")
    peak = max(1, round(total_iterations * warmup_fraction))
    if peak >= total_iterations:
        peak = total_iterations - 1
    points = []
    for i in range(total_iterations):
        if i <= peak:
            lr = LR_MIN + (LR_MAX - LR_MIN) * (i / peak)
        else:
            lr = LR_MAX - (LR_MAX - LR_MIN) * ((i - peak) / (total_iterations - 1 - peak))
        momentum = MOMENTUM_MAX - (MOMENTUM_MAX - MOMENTUM_MIN) \
            * (lr - LR_MIN) / (LR_MAX - LR_MIN)
        points.append(SchedulePoint(i, lr, momentum))
    return points


def write_schedule(points: Sequence[SchedulePoint], path) -> None:
    """Two-column text export (learning rate, momentum) per iteration."""
    with open(path, "w", encoding="ascii") as handle:
        for point in points:
            handle.write(f"{point.learning_rate:.8f} {point.momentum:.8f}\n")
