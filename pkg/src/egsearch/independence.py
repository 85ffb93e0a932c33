"""Conditional-independence tests ``I(x, y | S)`` used by the PC search.

Every test object exposes ``pvalue(x, y, S)`` (memoised per dataset) and is
callable as ``test(x, y, S, alpha)`` returning a :class:`CiDecision`.
Independence is declared iff ``p > alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.stats import chi2

from .data import Dataset
from .graph import MixedGraph

PIVOT_TOL = 1e-12


class DegenerateData(ArithmeticError):
    """The test statistic is undefined for this data (zero variance, singular matrix, empty df)."""


class DataMismatch(TypeError):
    """Continuous/discrete kind of the data does not match the requested procedure."""


@dataclass(frozen=True)
class CiDecision:
    independent: bool
    p_value: float
    statistic: float


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _check_args(x: int, y: int, S: Iterable[int]) -> tuple[int, int, tuple[int, ...]]:
    S = tuple(sorted(S))
    if x == y or x in S or y in S:
        raise ValueError("x, y must be distinct and outside the conditioning set")
    if x > y:
        x, y = y, x
    return x, y, S


def partial_correlation(data: Dataset, x: int, y: int, S: Iterable[int]) -> float:
    """Sample partial correlation of ``x`` and ``y`` given ``S``."""
    S = list(S)
    cov = data.covariance()
    idx = [x, y] + S
    if np.any(np.diag(cov)[idx] <= 0.0):
        raise DegenerateData("zero-variance variable")
    corr = data.correlation()
    if not S:
        return float(corr[x, y])
    c_ss = corr[np.ix_(S, S)]
    if np.linalg.eigvalsh(c_ss)[0] < PIVOT_TOL:
        raise DegenerateData("singular conditioning correlation matrix")
    c_sxy = corr[np.ix_(S, [x, y])]
    sol = np.linalg.solve(c_ss, c_sxy)
    resid = corr[np.ix_([x, y], [x, y])] - c_sxy.T @ sol
    vx, vy = resid[0, 0], resid[1, 1]
    if vx < PIVOT_TOL or vy < PIVOT_TOL:
        raise DegenerateData("variable is a linear function of the conditioning set")
    return float(resid[0, 1] / math.sqrt(vx * vy))


def fisher_z_test(data: Dataset, x: int, y: int, S: Iterable[int], alpha: float) -> CiDecision:
    """Fisher's z on the partial correlation, two-sided normal p-value.

    Raises :class:`DegenerateData` on zero variance, a singular correlation
    submatrix, or too few records (``N <= |S| + 3``).
    """
    _check_alpha(alpha)
    if data.discrete:
        raise DataMismatch("Fisher z needs continuous data")
    x, y, S = _check_args(x, y, S)
    dof = data.n_records - len(S) - 3
    if dof <= 0:
        raise DegenerateData("too few records for this conditioning set")
    r = partial_correlation(data, x, y, S)
    if abs(r) >= 1.0:
        stat = math.inf
        p = 0.0
    else:
        stat = 0.5 * math.log1p(2 * r / (1 - r)) * math.sqrt(dof)
        p = math.erfc(abs(stat) / math.sqrt(2.0))
    return CiDecision(p > alpha, p, stat)


def gsquare_test(data: Dataset, x: int, y: int, S: Iterable[int], alpha: float) -> CiDecision:
    """G^2 likelihood-ratio test over the contingency table of ``x, y`` within each ``S`` stratum.

    Degrees of freedom are ``(|x|-1)(|y|-1) prod |s|``; :class:`DegenerateData`
    is raised when they are zero.
    """
    _check_alpha(alpha)
    if not data.discrete:
        raise DataMismatch("G^2 needs discrete data")
    x, y, S = _check_args(x, y, S)
    cards = data.cardinalities
    df = (cards[x] - 1) * (cards[y] - 1) * math.prod(cards[s] for s in S)
    if df < 1:
        raise DegenerateData("zero degrees of freedom")
    vals = data.values
    if S:
        _, strata = np.unique(vals[:, list(S)], axis=0, return_inverse=True)
        strata = strata.reshape(-1)
        k = int(strata.max()) + 1
    else:
        strata = np.zeros(len(vals), dtype=np.int64)
        k = 1
    counts = np.zeros((k, cards[x], cards[y]))
    np.add.at(counts, (strata, vals[:, x], vals[:, y]), 1.0)
    n_x = counts.sum(axis=2, keepdims=True)
    n_y = counts.sum(axis=1, keepdims=True)
    n_s = counts.sum(axis=(1, 2), keepdims=True)
    expected = n_x * n_y / n_s
    mask = counts > 0
    g2 = float(2.0 * np.sum(counts[mask] * np.log(counts[mask] / expected[mask])))
    g2 = max(g2, 0.0)
    p = float(chi2.sf(g2, df))
    return CiDecision(p > alpha, p, g2)


def d_separated(truth: MixedGraph, x: int, y: int, S: Iterable[int]) -> bool:
    """d-separation via the moralised ancestral graph."""
    S = set(S)
    parents: list[set[int]] = [set() for _ in range(truth.n_nodes)]
    for a, b in truth.directed:
        parents[b].add(a)
    anc = set()
    stack = [x, y, *S]
    while stack:
        v = stack.pop()
        if v in anc:
            continue
        anc.add(v)
        stack.extend(parents[v])
    moral: dict[int, set[int]] = {v: set() for v in anc}
    for v in anc:
        ps = sorted(parents[v])
        for p in ps:
            moral[v].add(p)
            moral[p].add(v)
        for i, p in enumerate(ps):
            for q in ps[i + 1:]:
                moral[p].add(q)
                moral[q].add(p)
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for w in moral[v]:
            if w == y:
                return False
            if w not in seen and w not in S:
                seen.add(w)
                stack.append(w)
    return True


def dsep_oracle(truth: MixedGraph, x: int, y: int, S: Iterable[int]) -> CiDecision:
    indep = d_separated(truth, x, y, S)
    return CiDecision(indep, 1.0 if indep else 0.0, 0.0)


class _CachedTest:
    """Memoises p-values by ``(x, y, S)``; decisions depend on alpha only through the threshold."""

    fallback_p: float = 0.0

    def __init__(self, n_nodes: int):
        self.n_nodes = n_nodes
        self._pvalues: dict[tuple[int, int, tuple[int, ...]], float] = {}
        self.calls = 0

    def _compute(self, x: int, y: int, S: tuple[int, ...]) -> float:
        raise NotImplementedError

    def pvalue(self, x: int, y: int, S: Iterable[int]) -> float:
        self.calls += 1
        key = _check_args(x, y, S)
        p = self._pvalues.get(key)
        if p is None:
            try:
                p = self._compute(*key)
            except DegenerateData:
                p = self.fallback_p
            self._pvalues[key] = p
        return p

    def __call__(self, x: int, y: int, S: Iterable[int], alpha: float) -> CiDecision:
        _check_alpha(alpha)
        p = self.pvalue(x, y, S)
        return CiDecision(p > alpha, p, math.nan)


class FisherZTest(_CachedTest):
    """Fisher z test bound to a continuous dataset; degenerate cases decide "dependent"."""

    fallback_p = 0.0

    def __init__(self, data: Dataset):
        if data.discrete:
            raise DataMismatch("Fisher z needs continuous data")
        super().__init__(data.n_vars)
        self.data = data
        data.correlation()

    def _compute(self, x, y, S):
        return fisher_z_test(self.data, x, y, S, 0.5).p_value


class GSquareTest(_CachedTest):
    """G^2 test bound to a discrete dataset; degenerate cases decide "independent"."""

    def __init__(self, data: Dataset, degenerate_independent: bool = True):
        if not data.discrete:
            raise DataMismatch("G^2 needs discrete data")
        super().__init__(data.n_vars)
        self.data = data
        self.fallback_p = 1.0 if degenerate_independent else 0.0

    def _compute(self, x, y, S):
        return gsquare_test(self.data, x, y, S, 0.5).p_value


class DSepOracle(_CachedTest):
    """Exact independence answers read off a known DAG."""

    def __init__(self, truth: MixedGraph):
        super().__init__(truth.n_nodes)
        self.truth = truth

    def _compute(self, x, y, S):
        return 1.0 if d_separated(self.truth, x, y, S) else 0.0


def make_test(data: Dataset) -> _CachedTest:
    return GSquareTest(data) if data.discrete else FisherZTest(data)
