"""Shared driver for the experiment scripts: run specs, write rows, print per-engine means."""
import argparse
from dataclasses import replace
from pathlib import Path

from egsearch import ExperimentSpec, SearchConfig
from egsearch.evaluation import mean_by_engine, rows_to_csv, run_experiment

COUNTS = ("adj_plus", "adj_minus", "arcs_plus", "arcs_minus", "total_error")


def parser(doc: str, out: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply replication counts (e.g. 0.2 for a quick look)")
    ap.add_argument("--convergence-n", type=int, default=500)
    ap.add_argument("--restarts", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("essential", "raw"), default="essential")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=out)
    return ap


def run_grid(args, cells):
    """``cells`` yields (experiment_id, n_nodes, mean_arcs, n_records, replications)."""
    config = SearchConfig(convergence_n=args.convergence_n, restarts=args.restarts, seed=args.seed)
    all_rows = []
    for exp_id, n, arcs, records, reps in cells:
        spec = ExperimentSpec(
            n, arcs, records, replications=max(1, round(reps * args.scale)),
            config=replace(config, seed=config.seed + len(all_rows)),
            comparison_mode=args.mode, experiment_id=exp_id,
        )
        rows = run_experiment(spec, jobs=args.jobs)
        all_rows.extend(rows)
        summary = {c: mean_by_engine(rows, c) for c in COUNTS}
        print(f"[{exp_id}] nodes={n} mean_arcs={arcs} records={records} reps={spec.replications}")
        for engine in spec.engines:
            print("  " + engine.ljust(6) + " ".join(f"{c}={summary[c].get(engine, float('nan')):.2f}" for c in COUNTS))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(all_rows))
    print(f"wrote {len(all_rows)} rows to {out}")
