"""Structural error counts, experiment drivers and the distinct-graph protocol."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple, Sequence

import numpy as np

from .data import Dataset
from .equivalence import CyclicRejection, NoExtension, canonical_encoding, consistent_extension, dag_to_essential
from .graph import MixedGraph
from .independence import make_test
from .pc import run_pc
from .scoring import Scorer, score_kind_from_name
from .search import ENGINES, SearchConfig, run_engine
from .simulation import GeneratorConfig, generate

ALPHA_BIN_WIDTH = 0.005


class NodeCountMismatch(ValueError):
    pass


class StructuralDiff(NamedTuple):
    adj_plus: int
    adj_minus: int
    arcs_plus: int
    arcs_minus: int


def structural_diff(learned: MixedGraph, truth: MixedGraph, mode: str = "essential") -> StructuralDiff:
    """Adjacencies and arcs added/removed by ``learned`` relative to the reference.

    ``mode="essential"`` compares against the truth's essential graph, so only
    arcs directed in the whole equivalence class count; ``mode="raw"`` uses the
    truth's own arcs.
    """
    if learned.n_nodes != truth.n_nodes:
        raise NodeCountMismatch(f"{learned.n_nodes} vs {truth.n_nodes} nodes")
    if mode == "essential":
        ref = dag_to_essential(truth)
    elif mode in ("raw", "raw_dag"):
        ref = truth
    else:
        raise ValueError(f"unknown comparison mode {mode!r}")
    ls, rs = learned.skeleton_pairs(), ref.skeleton_pairs()
    return StructuralDiff(
        len(ls - rs),
        len(rs - ls),
        len(learned.directed - ref.directed),
        len(ref.directed - learned.directed),
    )


def total_error(d: StructuralDiff) -> int:
    return sum(d)


def derive_seed(base: int, *keys: int) -> int:
    """Independent 63-bit seed for a sub-stream identified by ``keys``."""
    ss = np.random.SeedSequence(entropy=base, spawn_key=tuple(keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class ExperimentSpec:
    n_nodes: int
    mean_arcs: float
    n_records: int
    replications: int = 1
    engines: tuple[str, ...] = ENGINES
    config: SearchConfig = field(default_factory=SearchConfig)
    comparison_mode: str = "essential"
    experiment_id: str = "exp"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        bad = set(self.engines) - set(ENGINES)
        if bad:
            raise ValueError(f"unknown engines {sorted(bad)}")
        if self.comparison_mode not in ("essential", "raw"):
            raise ValueError("comparison_mode must be 'essential' or 'raw'")
        GeneratorConfig(self.n_nodes, self.mean_arcs)


COLUMNS = (
    "experiment_id", "replication", "engine", "seed", "n_nodes", "mean_arcs",
    "n_records", "adj_plus", "adj_minus", "arcs_plus", "arcs_minus",
    "total_error", "log_score", "alpha_used", "candidates_generated", "wall_ms",
    "flagged",
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_replication(spec: ExperimentSpec, rep: int, timing: bool = False) -> list[dict]:
    base = spec.config.seed
    truth, _, data = generate(
        GeneratorConfig(spec.n_nodes, spec.mean_arcs, derive_seed(base, rep, 0)), spec.n_records
    )
    test = make_test(data)
    scorer = Scorer(data, spec.config.score_kind)
    rows = []
    for engine in spec.engines:
        seed = derive_seed(base, rep, 1 + ENGINES.index(engine))
        cfg = replace(spec.config, seed=seed)
        t0 = time.perf_counter()
        try:
            res = run_engine(engine, data, test, cfg, scorer)
        except Exception as exc:  # recorded, never propagated
            rows.append(dict(
                experiment_id=spec.experiment_id, replication=rep, engine=engine, seed=seed,
                n_nodes=spec.n_nodes, mean_arcs=spec.mean_arcs, n_records=spec.n_records,
                flagged=True, note=f"{type(exc).__name__}: {exc}",
            ))
            continue
        wall = (time.perf_counter() - t0) * 1000.0
        d = structural_diff(res.essential, truth, spec.comparison_mode)
        rows.append(dict(
            experiment_id=spec.experiment_id, replication=rep, engine=engine, seed=seed,
            n_nodes=spec.n_nodes, mean_arcs=spec.mean_arcs, n_records=spec.n_records,
            adj_plus=d.adj_plus, adj_minus=d.adj_minus, arcs_plus=d.arcs_plus,
            arcs_minus=d.arcs_minus, total_error=total_error(d), log_score=res.log_score,
            alpha_used=res.alpha_used, candidates_generated=res.candidates_generated,
            wall_ms=round(wall, 1) if timing else None, flagged=res.flagged,
        ))
    return rows


def _run_rep(args):
    return run_replication(*args)


def run_experiment(spec: ExperimentSpec, jobs: int = 1, timing: bool = False) -> list[dict]:
    """One row per (replication, engine), ordered by replication then engine."""
    work = [(spec, rep, timing) for rep in range(spec.replications)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_rep, work))
    else:
        chunks = [_run_rep(w) for w in work]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str] = COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def mean_by_engine(rows: Sequence[dict], column: str = "total_error") -> dict[str, float]:
    out: dict[str, list[float]] = {}
    for row in rows:
        if row.get(column) is not None:
            out.setdefault(row["engine"], []).append(float(row[column]))
    return {k: float(np.mean(v)) for k, v in out.items()}


# --- experiment spec files ----------------------------------------------------

_INT_KEYS = {"n_nodes", "n_records", "replications", "convergence_n", "restarts", "seed"}
_FLOAT_KEYS = {"mean_arcs", "alpha_lo", "alpha_hi", "gs1_alpha", "ess"}


def parse_spec_text(text: str) -> ExperimentSpec:
    """Parse a flat ``key = value`` file describing an :class:`ExperimentSpec`."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        raw[k] = v
    vals: dict = {}
    for k, v in raw.items():
        if k in _INT_KEYS:
            vals[k] = int(v)
        elif k in _FLOAT_KEYS:
            vals[k] = float(v)
        elif k == "max_cond":
            vals[k] = None if v.lower() in ("", "none") else int(v)
        elif k == "engines":
            vals[k] = tuple(e.strip().lower().replace("/", "") for e in v.split(",") if e.strip())
        elif k in ("score", "comparison_mode", "experiment_id"):
            vals[k] = v
        else:
            raise ValueError(f"unknown spec key {k!r}")
    for req in ("n_nodes", "mean_arcs", "n_records"):
        if req not in vals:
            raise ValueError(f"spec is missing {req!r}")
    cfg_names = {f.name for f in fields(SearchConfig)}
    cfg_kwargs = {k: vals.pop(k) for k in list(vals) if k in cfg_names}
    kind = score_kind_from_name(vals.pop("score", "bic"), vals.pop("ess", 1.0))
    cfg = SearchConfig(score_kind=kind, **cfg_kwargs)
    mode = vals.pop("comparison_mode", "essential")
    if mode == "raw_dag":
        mode = "raw"
    return ExperimentSpec(config=cfg, comparison_mode=mode, **vals)


# --- distinct essential graphs ------------------------------------------------

@dataclass
class DistinctResult:
    attempts: int
    rejected: int
    distinct: int
    runs: list[dict]
    best_score: float
    alpha_bins: np.ndarray
    alpha_counts: np.ndarray


def alpha_histogram(alphas: Sequence[float], lo: float, hi: float, width: float = ALPHA_BIN_WIDTH):
    n_bins = max(1, math.ceil(round((hi - lo) / width, 9)))
    edges = lo + width * np.arange(n_bins + 1)
    counts, _ = np.histogram(np.clip(alphas, lo, edges[-1]), bins=edges)
    return edges, counts


def count_distinct_essential_graphs(
    data: Dataset | None,
    runs: int,
    config: SearchConfig,
    test=None,
    scorer: Scorer | None = None,
) -> DistinctResult:
    """Run PC ``runs`` times with a fresh alpha and ordering each time and deduplicate the outputs.

    Cyclic outputs count as attempts but not as graphs. Each surviving graph is
    extended and scored; the alphas that produced a maximum-score graph are binned.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    test = test or make_test(data)
    if scorer is None and data is not None:
        scorer = Scorer(data, config.score_kind)
    rng = np.random.default_rng(config.seed)
    n = test.n_nodes
    ids: dict[str, int] = {}
    records = []
    rejected = 0
    for i in range(runs):
        alpha = float(rng.uniform(config.alpha_lo, config.alpha_hi))
        order = [int(v) for v in rng.permutation(n)]
        row = dict(run=i, alpha=alpha, status="ok", graph_id=None, log_score=None)
        try:
            out = run_pc(test, alpha, order, config.max_cond)
        except CyclicRejection:
            rejected += 1
            row["status"] = "cyclic"
            records.append(row)
            continue
        token = canonical_encoding(out.graph)
        row["graph_id"] = ids.setdefault(token, len(ids))
        if scorer is not None:
            try:
                row["log_score"] = scorer.network(consistent_extension(out.graph, rng))
            except NoExtension:
                row["status"] = "no_extension"
        records.append(row)
    scores = [r["log_score"] for r in records if r["log_score"] is not None]
    best = max(scores) if scores else -math.inf
    tol = 1e-9 * max(1.0, abs(best))
    for r in records:
        r["is_max"] = r["log_score"] is not None and r["log_score"] >= best - tol
    edges, counts = alpha_histogram(
        [r["alpha"] for r in records if r["is_max"]], config.alpha_lo, config.alpha_hi
    )
    return DistinctResult(runs, rejected, len(ids), records, best, edges, counts)
