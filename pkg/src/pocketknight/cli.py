"""Command-line entry points: UCI engine, matches, ingestion, exports."""

from __future__ import annotations

import argparse
import sys

from pocketknight import arena, encoding, pipeline, rules, uci
from pocketknight.evaluator import EvaluatorSpec, load_table_evaluator
from pocketknight.search import SearchConfig


def _evaluator_from_args(args) -> EvaluatorSpec:
    if args.evaluator == "table":
        if not args.table:
            raise SystemExit("--table FILE is required with --evaluator table")
        return load_table_evaluator(args.table, scheme=args.scheme)
    return EvaluatorSpec(kind=args.evaluator, scheme=args.scheme)


def _add_evaluator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--evaluator", choices=("uniform", "material", "table"),
                        default="material", help="position evaluator backing the search")
    parser.add_argument("--table", help="table-evaluator file (FEN | value | move:prior,...)")
    parser.add_argument("--scheme", choices=encoding.SCHEMES,
                        default=encoding.SCHEME_UCI, help="policy index space")


def _cmd_uci(args) -> int:
    uci.run_session(config=SearchConfig(), evaluator=_evaluator_from_args(args))
    return 0


def _cmd_perft(args) -> int:
    state = rules.parse_fen(args.fen) if args.fen else rules.initial_state()
    for depth in range(1, args.depth + 1):
        print(f"perft {depth}: {rules.perft(state, depth)}")
    return 0


def _cmd_labels(args) -> int:
    encoding.write_label_table(args.out)
    print(f"wrote {len(encoding.UCI_LABELS)} labels to {args.out}")
    return 0


def _cmd_match(args) -> int:
    openings = arena.load_openings(args.openings) if args.openings else \
        [rules.STARTING_FEN]
    spec = arena.MatchSpec(
        config_a=SearchConfig(seed=args.seed),
        config_b=SearchConfig(seed=args.seed + 10_000),
        openings=openings,
        games_per_opening=args.games_per_opening,
        node_limit=args.nodes,
        node_limit_b=args.nodes_b or args.nodes,
        evaluator=_evaluator_from_args(args),
        parallel=args.parallel,
    )
    result = arena.play_match(spec)
    for line in arena.summary_lines(result):
        print(line)
    if args.pgn_out:
        arena.write_pgns(result, args.pgn_out)
        print(f"pgn -> {args.pgn_out}")
    if args.table_out:
        arena.write_table(result, args.table_out)
        print(f"table -> {args.table_out}")
    return 0


def _cmd_ingest(args) -> int:
    stream, stats = pipeline.ingest(
        args.pgn, pipeline.IngestFilter(min_elo=args.min_elo), scheme=args.scheme)
    count = pipeline.write_samples(stream, args.out, scheme=args.scheme)
    for line in stats.lines():
        print(line)
    print(f"wrote {count} samples to {args.out}")
    return 0


def _cmd_schedule(args) -> int:
    points = pipeline.one_cycle_schedule(args.iterations, args.warmup_fraction)
    pipeline.write_schedule(points, args.out)
    print(f"wrote {len(points)} schedule points to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pocketknight",
        description="Crazyhouse chess engine with PUCT tree search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_uci = sub.add_parser("uci", help="run the UCI engine on stdin/stdout")
    _add_evaluator_args(p_uci)
    p_uci.set_defaults(func=_cmd_uci)

    p_perft = sub.add_parser("perft", help="count legal move sequences")
    p_perft.add_argument("--fen", help="position (default: start position)")
    p_perft.add_argument("--depth", type=int, default=3)
    p_perft.set_defaults(func=_cmd_perft)

    p_labels = sub.add_parser("labels", help="export the uci-2272 label table")
    p_labels.add_argument("--out", default="uci_labels.txt")
    p_labels.set_defaults(func=_cmd_labels)

    p_match = sub.add_parser("match", help="self-play match between two configs")
    p_match.add_argument("--openings", help="PGN games or FEN-per-line suite")
    p_match.add_argument("--games-per-opening", type=int, default=2)
    p_match.add_argument("--nodes", type=int, default=800, help="side A simulations per move")
    p_match.add_argument("--nodes-b", type=int, help="side B simulations (default: same)")
    p_match.add_argument("--parallel", type=int, default=1)
    p_match.add_argument("--seed", type=int, default=0)
    p_match.add_argument("--pgn-out", help="write all games as PGN")
    p_match.add_argument("--table-out", help="write the machine-readable result table")
    _add_evaluator_args(p_match)
    p_match.set_defaults(func=_cmd_match)

    p_ingest = sub.add_parser("ingest", help="convert PGNs to a ZHS1 sample file")
    p_ingest.add_argument("pgn", nargs="+", help="input PGN files")
    p_ingest.add_argument("--out", required=True, help="output ZHS1 file")
    p_ingest.add_argument("--min-elo", type=int, default=pipeline.MIN_ELO)
    p_ingest.add_argument("--scheme", choices=encoding.SCHEMES,
                          default=encoding.SCHEME_UCI)
    p_ingest.set_defaults(func=_cmd_ingest)

    p_sched = sub.add_parser("schedule", help="emit the one-cycle lr/momentum schedule")
    p_sched.add_argument("--iterations", type=int, required=True)
    p_sched.add_argument("--warmup-fraction", type=float,
                         default=pipeline.DEFAULT_WARMUP_FRACTION)
    p_sched.add_argument("--out", default="schedule.txt")
    p_sched.set_defaults(func=_cmd_schedule)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
