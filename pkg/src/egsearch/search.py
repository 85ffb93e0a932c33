"""Search engines: EGS, EGS/GS, GS and GS/1 plus the shared greedy hill-climber."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .equivalence import CyclicRejection, NoExtension, consistent_extension, dag_to_essential
from .graph import Dag, MixedGraph
from .pc import run_pc
from .scoring import Add, Del, GaussianBIC, Rev, ScoreKind, Scorer
from .simulation import random_dag

# Deltas at or below this are treated as no improvement; guards against
# cycling on round-off between score-equivalent neighbours.
MIN_IMPROVEMENT = 1e-9

ENGINES = ("egs", "egsgs", "gs", "gs1")


@dataclass(frozen=True)
class SearchConfig:
    alpha_lo: float = 0.005
    alpha_hi: float = 0.2
    convergence_n: int = 500
    restarts: int = 50
    seed: int = 0
    score_kind: ScoreKind = field(default_factory=GaussianBIC)
    gs1_alpha: float = 0.05
    max_cond: int | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha_lo < self.alpha_hi < 1.0:
            raise ValueError("need 0 < alpha_lo < alpha_hi < 1")
        if self.convergence_n < 1:
            raise ValueError("convergence_n must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0.0 < self.gs1_alpha < 1.0:
            raise ValueError("gs1_alpha must lie in (0, 1)")


@dataclass
class ScoredStructure:
    dag: Dag
    essential: MixedGraph
    log_score: float
    alpha_used: float | None = None
    iteration_found: int = 0
    candidates_generated: int = 0
    rejected: int = 0
    flagged: bool = False
    note: str = ""
    trace: list[float] = field(default_factory=list, repr=False)


def random_dag_uniform_start(n_nodes: int, rng: np.random.Generator) -> Dag:
    return random_dag(n_nodes, 0.5, rng)


def _reach_masks(masks: list[int], n: int) -> tuple[list[int], list[int]]:
    """Children bitmasks and descendant bitmasks for a DAG given as parent bitmasks."""
    children = [0] * n
    for v in range(n):
        m = masks[v]
        while m:
            low = m & -m
            children[low.bit_length() - 1] |= 1 << v
            m ^= low
    indeg = [bin(masks[v]).count("1") for v in range(n)]
    order = [v for v in range(n) if indeg[v] == 0]
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        m = children[v]
        while m:
            low = m & -m
            c = low.bit_length() - 1
            indeg[c] -= 1
            if indeg[c] == 0:
                order.append(c)
            m ^= low
    reach = [0] * n
    for v in reversed(order):
        r = 0
        m = children[v]
        while m:
            low = m & -m
            r |= low | reach[low.bit_length() - 1]
            m ^= low
        reach[v] = r
    return children, reach


def greedy_search(scorer: Scorer, start: Dag) -> ScoredStructure:
    """Steepest-ascent hill climbing over Add/Del/Rev until no edit improves the score.

    Ties go to the lowest ``(x, y)`` pair, then Add before Del before Rev.
    """
    n = start.n_nodes
    masks = [0] * n
    for a, b in start.directed:
        masks[b] |= 1 << a
    local = [scorer.local(v, masks[v]) for v in range(n)]
    steps = 0
    while True:
        children, reach = _reach_masks(masks, n)
        best = MIN_IMPROVEMENT
        best_op = None
        for x in range(n):
            bx = 1 << x
            for y in range(n):
                if x == y:
                    continue
                by = 1 << y
                if masks[y] & bx:
                    d_del = scorer.local(y, masks[y] & ~bx) - local[y]
                    if d_del > best:
                        best, best_op = d_del, Del(x, y)
                    d_rev = d_del + scorer.local(x, masks[x] | by) - local[x]
                    if d_rev > best:
                        others = children[x] & ~by
                        creates_cycle = False
                        while others:
                            low = others & -others
                            if reach[low.bit_length() - 1] & by:
                                creates_cycle = True
                                break
                            others ^= low
                        if not creates_cycle:
                            best, best_op = d_rev, Rev(x, y)
                elif not masks[x] & by:
                    d_add = scorer.local(y, masks[y] | bx) - local[y]
                    if d_add > best and not reach[y] & bx:
                        best, best_op = d_add, Add(x, y)
        if best_op is None:
            break
        x, y = best_op.x, best_op.y
        if isinstance(best_op, Add):
            masks[y] |= 1 << x
        else:
            masks[y] &= ~(1 << x)
            if isinstance(best_op, Rev):
                masks[x] |= 1 << y
            local[x] = scorer.local(x, masks[x])
        local[y] = scorer.local(y, masks[y])
        steps += 1
    dag = Dag(n, [(p, v) for v in range(n) for p in range(n) if masks[v] >> p & 1])
    return ScoredStructure(
        dag, dag_to_essential(dag), scorer.network(dag), iteration_found=steps
    )


def _empty_baseline(scorer: Scorer, note: str) -> ScoredStructure:
    empty = Dag(scorer.n_nodes)
    return ScoredStructure(empty, empty, scorer.network(empty), flagged=True, note=note)


def run_egs(
    data: Dataset,
    test,
    config: SearchConfig,
    scorer: Scorer | None = None,
    refine: bool = False,
) -> ScoredStructure:
    """Essential-graph search.

    Each iteration draws alpha, runs PC under the current ordering, extends the
    result to a DAG (optionally refined by greedy search), scores it, and then
    reshuffles the ordering. Stops after ``convergence_n`` consecutive
    candidates that do not beat the incumbent; rejected candidates count.
    """
    scorer = scorer or Scorer(data, config.score_kind)
    rng = np.random.default_rng(config.seed)
    n = test.n_nodes
    order = list(range(n))
    best: ScoredStructure | None = None
    trace: list[float] = []
    since_improvement = 0
    generated = 0
    rejected = 0
    while since_improvement < config.convergence_n:
        generated += 1
        alpha = float(rng.uniform(config.alpha_lo, config.alpha_hi))
        try:
            pc = run_pc(test, alpha, order, config.max_cond)
            dag = consistent_extension(pc.graph, rng)
        except (CyclicRejection, NoExtension):
            rejected += 1
            since_improvement += 1
        else:
            if refine:
                refined = greedy_search(scorer, dag)
                dag, essential, score = refined.dag, refined.essential, refined.log_score
            else:
                essential, score = pc.graph, scorer.network(dag)
            if best is None or score > best.log_score:
                best = ScoredStructure(dag, essential, score, alpha, generated)
                since_improvement = 0
            else:
                since_improvement += 1
        trace.append(best.log_score if best is not None else -math.inf)
        order = [int(v) for v in rng.permutation(n)]
    if best is None:
        best = _empty_baseline(scorer, "no candidate survived orientation")
    best.candidates_generated = generated
    best.rejected = rejected
    best.trace = trace
    return best


def run_egs_gs(data: Dataset, test, config: SearchConfig, scorer: Scorer | None = None) -> ScoredStructure:
    return run_egs(data, test, config, scorer, refine=True)


def _restarts(scorer: Scorer, starts, config: SearchConfig) -> ScoredStructure:
    best: ScoredStructure | None = None
    trace = []
    for i, start in enumerate(starts):
        res = greedy_search(scorer, start)
        if best is None or res.log_score > best.log_score:
            best = res
            best.iteration_found = i + 1
        trace.append(best.log_score)
    best.candidates_generated = config.restarts
    best.trace = trace
    return best


def run_gs(data: Dataset, config: SearchConfig, scorer: Scorer | None = None) -> ScoredStructure:
    """Greedy search restarted from ``restarts`` independent random DAGs."""
    scorer = scorer or Scorer(data, config.score_kind)
    rng = np.random.default_rng(config.seed)
    starts = (random_dag_uniform_start(scorer.n_nodes, rng) for _ in range(config.restarts))
    return _restarts(scorer, starts, config)


def run_gs1(data: Dataset, test, config: SearchConfig, scorer: Scorer | None = None) -> ScoredStructure:
    """Greedy search whose first start is a PC extension; later restarts are random."""
    scorer = scorer or Scorer(data, config.score_kind)
    rng = np.random.default_rng(config.seed)
    n = scorer.n_nodes
    note = ""
    try:
        pc = run_pc(test, config.gs1_alpha, range(n), config.max_cond)
        first = consistent_extension(pc.graph, rng)
    except (CyclicRejection, NoExtension) as exc:
        note = f"PC start rejected ({type(exc).__name__}); random start used"
        first = random_dag_uniform_start(n, rng)

    def starts():
        yield first
        for _ in range(config.restarts - 1):
            yield random_dag_uniform_start(n, rng)

    best = _restarts(scorer, starts(), config)
    if note:
        best.flagged = True
        best.note = note
    if best.iteration_found == 1 and not note:
        best.alpha_used = config.gs1_alpha
    return best


def run_engine(name: str, data: Dataset, test, config: SearchConfig, scorer: Scorer | None = None):
    if name == "egs":
        return run_egs(data, test, config, scorer)
    if name == "egsgs":
        return run_egs_gs(data, test, config, scorer)
    if name == "gs":
        return run_gs(data, config, scorer)
    if name == "gs1":
        return run_gs1(data, test, config, scorer)
    raise ValueError(f"unknown engine {name!r}; expected one of {ENGINES}")
