"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 budget refusal, 4 construction
failure.  Errors print one machine-parseable line ``error: <kind>: <msg>``
on stderr.  All randomness flows from explicit ``--seed`` values, and
identical invocations produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys

from . import formats
from .analysis import DeltaMatching, find_delta_matching, peel_layers
from .decoder import decode, measure
from .errors import BudgetExceededError, ConstructionError, InputError
from .graph import DEFAULT_SUBSET_BUDGET, build_random_biregular, check_expansion
from .harness import load_config, run_experiment, summary_lines, write_records_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_CONSTRUCTION = 4


def _parse_subset(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad vertex list {text!r}: {exc}") from exc


def _cmd_gen_graph(args) -> int:
    g = build_random_biregular(args.n, args.c, args.d, args.seed)
    formats.write_graph(g, args.out)
    print(f"wrote graph n={g.n} m={g.m} c={g.c} d={g.d} edges={g.num_edges} to {args.out}")
    return EXIT_OK


def _cmd_check_expansion(args) -> int:
    g = formats.read_graph(args.graph)
    report = check_expansion(
        g, args.k, args.alpha, subset_budget=args.budget, fast=args.fast
    )
    print(f"holds = {str(report.holds).lower()}")
    print(f"min_ratio = {report.min_ratio!r}")
    if report.witness is not None:
        print("witness = " + ",".join(str(i) for i in report.witness))
    return EXIT_OK


def _cmd_measure(args) -> int:
    g = formats.read_graph(args.graph)
    x = formats.read_vector(args.signal, expected_len=g.n)
    formats.write_vector(measure(g, x), args.out)
    print(f"wrote measurement of length {g.m} to {args.out}")
    return EXIT_OK


def _cmd_decode(args) -> int:
    g = formats.read_graph(args.graph)
    y = formats.read_vector(args.measurement, expected_len=g.m)
    result = decode(g, y, max_rounds=args.max_rounds, tol=args.tol)
    formats.write_vector(result.estimate, args.out)
    if args.trace_csv:
        formats.write_trace_csv(result.round_stats, args.trace_csv)
    final_gap = result.gap_trace[-1] if result.gap_trace else 0.0
    print(
        f"converged = {str(result.converged).lower()}\n"
        f"rounds = {result.rounds_run}\n"
        f"max_gap = {final_gap!r}"
    )
    return EXIT_OK


def _cmd_matching(args) -> int:
    g = formats.read_graph(args.graph)
    subset = _parse_subset(args.subset)
    result = find_delta_matching(g, subset, args.delta)
    if isinstance(result, DeltaMatching):
        formats.write_matching_csv(result.edges, args.out)
        print(f"matching = found\nedges = {len(result.edges)}")
        return EXIT_OK
    print(
        "matching = none\n"
        f"flow_value = {result.flow_value}\n"
        f"cut_capacity = {result.capacity}\n"
        "cut_left = " + ",".join(str(i) for i in sorted(result.left_side)) + "\n"
        "cut_right = " + ",".join(str(j) for j in sorted(result.right_side))
    )
    return EXIT_OK


def _cmd_peel(args) -> int:
    g = formats.read_graph(args.graph)
    subset = _parse_subset(args.subset)
    peel = peel_layers(g, subset)
    formats.write_peeling_csv(peel, args.out)
    print(
        f"layers = {len(peel.layers)}\n"
        f"stalled = {str(peel.stalled).lower()}\n"
        "residual = " + ",".join(str(i) for i in sorted(peel.residual))
    )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    records, summary = run_experiment(cfg)
    write_records_csv(records, args.records)
    for line in summary_lines(summary):
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expander-recovery",
        description="Sparse nonnegative recovery over biregular bipartite graphs: "
        "graph generation, expansion certification, decoding, matchings, "
        "peeling diagnostics, and seeded experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a random biregular graph file")
    p.add_argument("--n", type=int, required=True, help="variable vertex count")
    p.add_argument("--c", type=int, required=True, help="variable degree")
    p.add_argument("--d", type=int, required=True, help="check degree")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output graph file")
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("check-expansion", help="exhaustively certify subset expansion")
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True, help="max subset size")
    p.add_argument("--alpha", type=float, required=True, help="expansion factor")
    p.add_argument("--fast", action="store_true", help="stop at the first violation")
    p.add_argument("--budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    p.set_defaults(func=_cmd_check_expansion)

    p = sub.add_parser("measure", help="apply the measurement matrix to a signal file")
    p.add_argument("graph")
    p.add_argument("signal", help="signal vector file (length n)")
    p.add_argument("--out", required=True, help="output measurement file")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("decode", help="recover a signal estimate from a measurement file")
    p.add_argument("graph")
    p.add_argument("measurement", help="measurement vector file (length m)")
    p.add_argument("--out", required=True, help="output estimate file")
    p.add_argument("--max-rounds", type=int, default=100)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--trace-csv", default=None, help="write per-round diagnostics CSV")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("matching", help="build a delta-matching for a subset via max-flow")
    p.add_argument("graph")
    p.add_argument("--s", dest="subset", required=True, help="comma-separated variable indices")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", required=True, help="output matching CSV (i,j rows)")
    p.set_defaults(func=_cmd_matching)

    p = sub.add_parser("peel", help="unique-neighbor peeling decomposition of a subset")
    p.add_argument("graph")
    p.add_argument("--s", dest="subset", required=True, help="comma-separated variable indices")
    p.add_argument("--out", required=True, help="output peeling CSV (layer,vertex rows)")
    p.set_defaults(func=_cmd_peel)

    p = sub.add_parser("experiment", help="run a seeded experiment from a config file")
    p.add_argument("config", help="flat 'key = value' config file")
    p.add_argument("--records", required=True, help="output records CSV")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"error: budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConstructionError as exc:
        print(f"error: construction: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except OSError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
