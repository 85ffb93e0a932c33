"""Decomposable structure scores ``log P(D, S)`` with a family cache.

The structure prior is uniform, so the network score is the sum of the
per-node family terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from scipy.special import gammaln

from .data import Dataset
from .graph import Dag, MixedGraph, has_directed_cycle
from .independence import DataMismatch

# Floor for residual variances, keeps the Gaussian log-likelihood finite on
# perfectly fitted or constant columns.
VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class BDeu:
    equivalent_sample_size: float = 1.0

    def __post_init__(self):
        if not self.equivalent_sample_size > 0:
            raise ValueError("equivalent sample size must be positive")


@dataclass(frozen=True)
class GaussianBIC:
    pass


ScoreKind = Union[BDeu, GaussianBIC]


def score_kind_from_name(name: str, ess: float = 1.0) -> ScoreKind:
    name = name.lower()
    if name == "bic":
        return GaussianBIC()
    if name == "bdeu":
        return BDeu(ess)
    raise ValueError(f"unknown score {name!r}")


def _check_kind(kind: ScoreKind, data: Dataset) -> None:
    if isinstance(kind, BDeu) and not data.discrete:
        raise DataMismatch("BDeu needs discrete data")
    if isinstance(kind, GaussianBIC) and data.discrete:
        raise DataMismatch("Gaussian BIC needs continuous data")


def _gaussian_bic(data: Dataset, child: int, parents: list[int]) -> float:
    cov = data.covariance()
    n = data.n_records
    var = cov[child, child]
    if parents:
        c_pp = cov[np.ix_(parents, parents)]
        c_pc = cov[parents, child]
        try:
            beta = np.linalg.solve(c_pp, c_pc)
        except np.linalg.LinAlgError:
            beta = np.linalg.lstsq(c_pp, c_pc, rcond=None)[0]
        var = var - float(c_pc @ beta)
    var = max(float(var), VARIANCE_FLOOR)
    loglik = -0.5 * n * (math.log(2.0 * math.pi * var) + 1.0)
    return loglik - 0.5 * (len(parents) + 2) * math.log(n)


def _bdeu(data: Dataset, child: int, parents: list[int], ess: float) -> float:
    vals = data.values
    r = data.cardinalities[child]
    q = math.prod(data.cardinalities[p] for p in parents)
    if parents:
        _, config = np.unique(vals[:, parents], axis=0, return_inverse=True)
        config = config.reshape(-1)
        n_cfg = int(config.max()) + 1
    else:
        config = np.zeros(len(vals), dtype=np.int64)
        n_cfg = 1
    counts = np.zeros((n_cfg, r))
    np.add.at(counts, (config, vals[:, child]), 1.0)
    a_j = ess / q
    a_jk = ess / (q * r)
    n_j = counts.sum(axis=1)
    score = float(np.sum(gammaln(a_j) - gammaln(a_j + n_j)))
    score += float(np.sum(gammaln(a_jk + counts) - gammaln(a_jk)))
    return score


def log_family_score(kind: ScoreKind, data: Dataset, child: int, parents: Iterable[int]) -> float:
    _check_kind(kind, data)
    parents = sorted(set(parents))
    if child in parents:
        raise ValueError("a node cannot be its own parent")
    if isinstance(kind, GaussianBIC):
        return _gaussian_bic(data, child, parents)
    return _bdeu(data, child, parents, kind.equivalent_sample_size)


@dataclass(frozen=True)
class Add:
    x: int
    y: int


@dataclass(frozen=True)
class Del:
    x: int
    y: int


@dataclass(frozen=True)
class Rev:
    x: int
    y: int


EditOp = Union[Add, Del, Rev]


class InvalidEdit(ValueError):
    pass


def apply_edit(d: MixedGraph, op: EditOp) -> Dag:
    if op.x == op.y:
        raise InvalidEdit("edit endpoints must differ")
    edges = set(d.directed)
    if isinstance(op, Add):
        if d.is_adjacent(op.x, op.y):
            raise InvalidEdit(f"{op.x} and {op.y} are already adjacent")
        edges.add((op.x, op.y))
    elif (op.x, op.y) not in edges:
        raise InvalidEdit(f"no arc {op.x} -> {op.y}")
    else:
        edges.discard((op.x, op.y))
        if isinstance(op, Rev):
            edges.add((op.y, op.x))
    out = MixedGraph(d.n_nodes, frozenset(edges))
    if has_directed_cycle(out):
        raise InvalidEdit(f"{op} creates a directed cycle")
    return Dag(d.n_nodes, edges)


class Scorer:
    """Family scores for one dataset and score kind, memoised by ``(child, parent bitmask)``."""

    def __init__(self, data: Dataset, kind: ScoreKind, cache: bool = True):
        _check_kind(kind, data)
        self.data = data
        self.kind = kind
        self.use_cache = cache
        self._cache: dict[tuple[int, int], float] = {}
        self.hits = 0
        self.misses = 0
        if not data.discrete:
            data.covariance()

    @property
    def n_nodes(self) -> int:
        return self.data.n_vars

    def local(self, child: int, mask: int) -> float:
        key = (child, mask)
        if self.use_cache:
            val = self._cache.get(key)
            if val is not None:
                self.hits += 1
                return val
        self.misses += 1
        parents = [i for i in range(self.n_nodes) if mask >> i & 1]
        val = log_family_score(self.kind, self.data, child, parents)
        if self.use_cache:
            self._cache[key] = val
        return val

    def family(self, child: int, parents: Iterable[int]) -> float:
        mask = 0
        for p in parents:
            mask |= 1 << p
        return self.local(child, mask)

    def network(self, d: MixedGraph) -> float:
        if d.undirected:
            raise ValueError("only fully directed graphs can be scored")
        masks = [0] * d.n_nodes
        for a, b in d.directed:
            masks[b] |= 1 << a
        return sum(self.local(v, masks[v]) for v in range(d.n_nodes))

    def delta(self, d: MixedGraph, op: EditOp) -> float:
        """Score change of ``op`` from at most two family re-evaluations."""
        apply_edit(d, op)
        masks = [0] * d.n_nodes
        for a, b in d.directed:
            masks[b] |= 1 << a
        x, y = op.x, op.y
        if isinstance(op, Add):
            return self.local(y, masks[y] | 1 << x) - self.local(y, masks[y])
        if isinstance(op, Del):
            return self.local(y, masks[y] & ~(1 << x)) - self.local(y, masks[y])
        return (
            self.local(y, masks[y] & ~(1 << x)) - self.local(y, masks[y])
            + self.local(x, masks[x] | 1 << y) - self.local(x, masks[x])
        )


def log_network_score(kind: ScoreKind, data: Dataset, d: MixedGraph) -> float:
    return Scorer(data, kind, cache=False).network(d)


def delta_score(kind: ScoreKind, data: Dataset, d: MixedGraph, op: EditOp) -> float:
    return Scorer(data, kind, cache=False).delta(d, op)
