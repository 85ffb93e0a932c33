from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from egsearch.equivalence import CyclicRejection, dag_to_essential
from egsearch.graph import Dag, MixedGraph, has_directed_cycle
from egsearch.independence import DSepOracle, FisherZTest
from egsearch.pc import learn_skeleton, run_pc
from egsearch.simulation import GeneratorConfig, generate, random_dag

A, B, C = range(3)


def test_oracle_collider():
    out = run_pc(DSepOracle(Dag(3, [(A, B), (C, B)])), 0.05, [B, C, A])
    assert out.graph == MixedGraph(3, {(A, B), (C, B)})
    assert out.sepsets == {(A, C): frozenset()}


def test_oracle_chain():
    out = run_pc(DSepOracle(Dag(3, [(A, B), (B, C)])), 0.3, [C, A, B])
    assert out.graph == MixedGraph(3, undirected={(A, B), (B, C)})
    assert out.sepsets == {(A, C): frozenset({B})}


def test_oracle_empty():
    out = run_pc(DSepOracle(Dag(3)), 0.05, [0, 1, 2])
    assert out.graph == MixedGraph(3)
    assert out.sepsets == {(0, 1): frozenset(), (0, 2): frozenset(), (1, 2): frozenset()}
    assert out.tests_performed == 3


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_oracle_recovers_essential_graph_for_any_ordering(seed, n):
    rng = np.random.default_rng(seed)
    truth = random_dag(n, rng.uniform(0.2, 0.8), rng)
    expected = dag_to_essential(truth)
    for _ in range(3):
        out = run_pc(DSepOracle(truth), 0.05, rng.permutation(n))
        assert out.graph == expected


@given(st.integers(0, 2**32 - 1))
def test_conditioning_sets_respect_adjacency(seed):
    rng = np.random.default_rng(seed)
    truth = random_dag(6, 0.5, rng)
    seen = []

    def check(x, y, S, adjacent):
        assert set(S) <= adjacent - {x, y}
        seen.append(S)

    run_pc(DSepOracle(truth), 0.05, rng.permutation(6), on_test=check)
    assert seen


def test_sepsets_exclude_endpoints_and_cover_removed_pairs():
    _, _, data = generate(GeneratorConfig(8, 10, seed=2), 300)
    skel, seps, _ = learn_skeleton(FisherZTest(data), 0.05, range(8))
    removed = {p for p in combinations(range(8), 2) if not skel.is_adjacent(*p)}
    assert set(seps) == removed
    for (x, y), S in seps.items():
        assert x not in S and y not in S


def test_finite_data_outputs_are_deterministic_and_well_formed():
    _, _, data = generate(GeneratorConfig(10, 15, seed=4), 250)
    test = FisherZTest(data)
    rng = np.random.default_rng(0)
    for _ in range(30):
        alpha, order = rng.uniform(0.005, 0.2), rng.permutation(10)
        try:
            a = run_pc(test, alpha, order)
        except CyclicRejection:
            with pytest.raises(CyclicRejection):
                run_pc(test, alpha, order)
            continue
        b = run_pc(test, alpha, order)
        assert a == b
        assert not has_directed_cycle(a.graph)
        assert not any((y, x) in a.graph.directed for x, y in a.graph.directed)


def test_max_cond_caps_conditioning_size():
    truth = Dag(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    sizes = []
    run_pc(DSepOracle(truth), 0.05, range(4), max_cond=1, on_test=lambda x, y, S, adj: sizes.append(len(S)))
    assert max(sizes) == 1
    # 0 and 3 need {1, 2}; with the cap the edge survives
    assert run_pc(DSepOracle(truth), 0.05, range(4), max_cond=1).graph.is_adjacent(0, 3)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        run_pc(DSepOracle(Dag(3)), 0.0, [0, 1, 2])
    with pytest.raises(ValueError):
        run_pc(DSepOracle(Dag(3)), 0.05, [0, 0, 1])
