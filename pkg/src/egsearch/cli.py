"""Command line entry point: generate, learn, diff, experiment, distinct."""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .data import DataFormatError, dataset_to_csv, read_csv
from .equivalence import CyclicRejection, NoExtension
from .evaluation import (
    NodeCountMismatch,
    count_distinct_essential_graphs,
    parse_spec_text,
    rows_to_csv,
    run_experiment,
    structural_diff,
    total_error,
)
from .graph import CycleError, Dag, GraphFormatError, MixedGraph, read_graph, write_graph
from .independence import DataMismatch, DegenerateData, make_test
from .scoring import InvalidEdit, Scorer, score_kind_from_name
from .search import ENGINES, SearchConfig, run_engine
from .simulation import GeneratorConfig, generate

KNOWN_ERRORS = (
    OSError, ValueError, DataFormatError, GraphFormatError, CycleError, CyclicRejection,
    NoExtension, DataMismatch, DegenerateData, InvalidEdit, NodeCountMismatch,
)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        alpha_lo=args.alpha_lo,
        alpha_hi=args.alpha_hi,
        convergence_n=args.n,
        restarts=args.restarts,
        seed=args.seed,
        score_kind=score_kind_from_name(args.score, args.ess),
    )


def cmd_generate(args) -> None:
    truth, _, data = generate(GeneratorConfig(args.nodes, args.mean_arcs, args.seed), args.records)
    _write(args.out_data, dataset_to_csv(data))
    _write(args.out_graph, write_graph(truth, data.names))


def cmd_learn(args) -> None:
    data = read_csv(args.data, discrete=args.discrete)
    cfg = _search_config(args)
    res = run_engine(args.engine, data, make_test(data), cfg, Scorer(data, cfg.score_kind))
    _write(args.out_graph, write_graph(res.essential, data.names))
    if args.out_dag:
        _write(args.out_dag, write_graph(res.dag, data.names))
    alpha = "" if res.alpha_used is None else f"{res.alpha_used:.6g}"
    print(
        f"engine={args.engine} log_score={res.log_score!r} alpha={alpha} "
        f"candidates={res.candidates_generated} flagged={int(res.flagged)}"
    )


def _align(g: MixedGraph, names: list[str], target: list[str]) -> MixedGraph:
    if sorted(names) != sorted(target):
        raise NodeCountMismatch("learned and truth graphs name different variables")
    pos = {name: i for i, name in enumerate(target)}
    m = [pos[name] for name in names]
    return MixedGraph(
        g.n_nodes,
        frozenset((m[a], m[b]) for a, b in g.directed),
        frozenset((m[a], m[b]) for a, b in g.undirected),
    )


def cmd_diff(args) -> None:
    learned, lnames = read_graph(Path(args.learned).read_text())
    truth_g, tnames = read_graph(Path(args.truth).read_text())
    if len(lnames) != len(tnames):
        raise NodeCountMismatch(f"{len(lnames)} vs {len(tnames)} nodes")
    truth = Dag.from_graph(truth_g)
    d = structural_diff(_align(learned, lnames, tnames), truth, args.mode)
    print(
        f"adj_plus={d.adj_plus} adj_minus={d.adj_minus} arcs_plus={d.arcs_plus} "
        f"arcs_minus={d.arcs_minus} total_error={total_error(d)}"
    )


def cmd_experiment(args) -> None:
    spec = parse_spec_text(Path(args.spec).read_text())
    rows = run_experiment(spec, jobs=args.jobs, timing=args.timing)
    _write(args.out, rows_to_csv(rows))


def cmd_distinct(args) -> None:
    data = read_csv(args.data, discrete=args.discrete)
    cfg = SearchConfig(
        alpha_lo=args.alpha_lo,
        alpha_hi=args.alpha_hi,
        seed=args.seed,
        score_kind=score_kind_from_name(args.score, args.ess),
    )
    res = count_distinct_essential_graphs(data, args.runs, cfg)
    _write(args.out, rows_to_csv(res.runs, ("run", "alpha", "status", "graph_id", "log_score", "is_max")))
    if args.hist_out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha_lo", "alpha_hi", "max_score_count"])
        for lo, hi, c in zip(res.alpha_bins[:-1], res.alpha_bins[1:], res.alpha_counts):
            w.writerow([f"{lo:.4f}", f"{hi:.4f}", int(c)])
        _write(args.hist_out, buf.getvalue())
    print(f"distinct={res.distinct} attempts={res.attempts} rejected={res.rejected}")


def _add_search_args(p: argparse.ArgumentParser, with_loop: bool = True) -> None:
    p.add_argument("--alpha-lo", type=float, default=0.005)
    p.add_argument("--alpha-hi", type=float, default=0.2)
    if with_loop:
        p.add_argument("--n", type=int, default=500, help="EGS convergence parameter")
        p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--score", choices=("bic", "bdeu"), default="bic")
    p.add_argument("--ess", type=float, default=1.0, help="BDeu equivalent sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--discrete", action="store_true", help="read data as integer category codes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="egsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a random DAG and linear-Gaussian data")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--mean-arcs", type=float, required=True)
    p.add_argument("--records", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-data", required=True)
    p.add_argument("--out-graph", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("learn", help="learn a structure with one search engine")
    p.add_argument("--engine", choices=ENGINES, required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out-graph", required=True, help="learned essential graph")
    p.add_argument("--out-dag", help="optional: the scored DAG itself")
    _add_search_args(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("diff", help="count adjacency and arc errors against a truth DAG")
    p.add_argument("--learned", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--mode", choices=("essential", "raw"), default="essential")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("experiment", help="run a key=value experiment spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill wall_ms (output no longer reproducible)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("distinct", help="count distinct PC outputs over random alpha/orderings")
    p.add_argument("--data", required=True)
    p.add_argument("--runs", type=int, default=1300)
    p.add_argument("--out", required=True)
    p.add_argument("--hist-out")
    _add_search_args(p, with_loop=False)
    p.set_defaults(func=cmd_distinct)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except KNOWN_ERRORS as exc:
        print(f"egsearch {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
