"""PC search parameterised by the significance level and the test ordering."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .equivalence import meek_closure, orient_v_structures
from .graph import MixedGraph

SepsetTable = dict[tuple[int, int], frozenset[int]]


@dataclass(frozen=True)
class PcOutput:
    graph: MixedGraph
    sepsets: SepsetTable
    alpha_used: float
    tests_performed: int


def check_ordering(order: Sequence[int], n: int) -> list[int]:
    order = [int(v) for v in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"ordering is not a permutation of 0..{n - 1}")
    return order


def learn_skeleton(
    test,
    alpha: float,
    order: Sequence[int],
    max_cond: int | None = None,
    on_test: Callable[[int, int, tuple[int, ...], set[int]], None] | None = None,
) -> tuple[MixedGraph, SepsetTable, int]:
    """Edge-removal phase of PC.

    For conditioning size 0, 1, 2, ... visit adjacent pairs in order-rank
    sequence and try subsets of ``adj(x) | adj(y)`` (minus ``x, y``) of that
    size. The first set found independent removes the edge at once.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = test.n_nodes
    order = check_ordering(order, n)
    rank = [0] * n
    for i, v in enumerate(order):
        rank[v] = i
    adj = [set(range(n)) - {v} for v in range(n)]
    sepsets: SepsetTable = {}
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    n_tests = 0
    level = 0
    while max_cond is None or level <= max_cond:
        any_candidate = False
        for x, y in pairs:
            if y not in adj[x]:
                continue
            pool = sorted((adj[x] | adj[y]) - {x, y}, key=rank.__getitem__)
            if len(pool) < level:
                continue
            any_candidate = True
            for S in combinations(pool, level):
                if on_test is not None:
                    on_test(x, y, S, adj[x] | adj[y])
                n_tests += 1
                if test(x, y, S, alpha).independent:
                    adj[x].discard(y)
                    adj[y].discard(x)
                    sepsets[(min(x, y), max(x, y))] = frozenset(S)
                    break
        if not any_candidate:
            break
        level += 1
    skel = MixedGraph(
        n, undirected=frozenset((a, b) for a in range(n) for b in adj[a] if a < b)
    )
    return skel, sepsets, n_tests


def run_pc(
    test,
    alpha: float,
    order: Sequence[int],
    max_cond: int | None = None,
    on_test=None,
) -> PcOutput:
    """Full PC: skeleton, v-structure orientation, two-rule orientation closure.

    Raises ``CyclicRejection`` when orientation yields a directed cycle.
    """
    skel, sepsets, n_tests = learn_skeleton(test, alpha, order, max_cond, on_test)
    oriented = orient_v_structures(skel, sepsets, order)
    graph = meek_closure(oriented)
    return PcOutput(graph, sepsets, alpha, n_tests)
