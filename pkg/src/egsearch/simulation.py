"""Random ground-truth DAGs and linear-Gaussian data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, default_names
from .graph import Dag, topological_order

BETA_LOW, BETA_HIGH = 0.1, 0.9


@dataclass(frozen=True)
class GeneratorConfig:
    n_nodes: int
    mean_arcs: float
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("need at least one node")
        max_arcs = self.n_nodes * (self.n_nodes - 1) / 2
        if not 0 <= self.mean_arcs <= max_arcs:
            raise ValueError(f"mean_arcs must lie in [0, {max_arcs}]")

    @property
    def edge_probability(self) -> float:
        pairs = self.n_nodes * (self.n_nodes - 1) / 2
        return self.mean_arcs / pairs if pairs else 0.0


def random_dag(n_nodes: int, edge_prob: float, rng: np.random.Generator) -> Dag:
    """Random permutation as topological order; each forward pair kept with ``edge_prob``."""
    perm = rng.permutation(n_nodes)
    keep = rng.random(n_nodes * (n_nodes - 1) // 2) < edge_prob
    edges = []
    k = 0
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if keep[k]:
                edges.append((int(perm[i]), int(perm[j])))
            k += 1
    return Dag(n_nodes, edges)


def random_dag_from_config(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> Dag:
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    return random_dag(cfg.n_nodes, cfg.edge_probability, rng)


def draw_sem_params(d: Dag, rng: np.random.Generator) -> dict[tuple[int, int], float]:
    edges = sorted(d.directed)
    betas = rng.uniform(BETA_LOW, BETA_HIGH, size=len(edges))
    return {e: float(b) for e, b in zip(edges, betas)}


def sample_linear_sem(
    d: Dag,
    params: dict[tuple[int, int], float],
    n_records: int,
    rng: np.random.Generator,
    names: list[str] | None = None,
) -> Dataset:
    """Each node is the beta-weighted sum of its parents plus standard-normal noise."""
    missing = set(d.directed) - set(params)
    if missing:
        raise ValueError(f"no coefficient for edges {sorted(missing)}")
    noise = rng.standard_normal((n_records, d.n_nodes))
    values = np.zeros((n_records, d.n_nodes))
    parents = d.parent_lists()
    for v in topological_order(d):
        values[:, v] = noise[:, v]
        for p in parents[v]:
            values[:, v] += params[(p, v)] * values[:, p]
    return Dataset(tuple(names or default_names(d.n_nodes)), values)


def generate(cfg: GeneratorConfig, n_records: int):
    """Truth DAG, coefficients and dataset, all drawn from one seeded stream."""
    rng = np.random.default_rng(cfg.seed)
    dag = random_dag_from_config(cfg, rng)
    params = draw_sem_params(dag, rng)
    data = sample_linear_sem(dag, params, n_records, rng)
    return dag, params, data
