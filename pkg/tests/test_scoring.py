import math
from collections import defaultdict
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from egsearch.data import Dataset
from egsearch.equivalence import dag_to_essential
from egsearch.graph import Dag
from egsearch.independence import DataMismatch
from egsearch.scoring import (
    Add,
    BDeu,
    Del,
    GaussianBIC,
    InvalidEdit,
    Rev,
    Scorer,
    apply_edit,
    delta_score,
    log_family_score,
    log_network_score,
)
from egsearch.simulation import draw_sem_params, random_dag, sample_linear_sem
from oracles import all_dags

BIC = GaussianBIC()


def continuous(values):
    return Dataset(tuple(f"V{i}" for i in range(values.shape[1])), values)


def random_instance(seed, n=6):
    rng = np.random.default_rng(seed)
    d = random_dag(n, 0.4, rng)
    return d, sample_linear_sem(d, draw_sem_params(d, rng), 200, rng)


def test_gaussian_parentless_matches_log_density_sum(rng):
    x = rng.standard_normal(500)
    data = continuous(x[:, None])
    mu, var = x.mean(), x.var()
    direct = np.sum(-0.5 * np.log(2 * np.pi * var) - (x - mu) ** 2 / (2 * var))
    expected = direct - 0.5 * 2 * math.log(500)
    assert log_family_score(BIC, data, 0, []) == pytest.approx(expected, rel=1e-9)


def test_gaussian_with_parents_matches_regression_likelihood(rng):
    values = rng.standard_normal((300, 3))
    values[:, 2] += 0.7 * values[:, 0] - 0.4 * values[:, 1]
    design = np.column_stack([np.ones(300), values[:, :2]])
    resid = values[:, 2] - design @ np.linalg.lstsq(design, values[:, 2], rcond=None)[0]
    var = np.mean(resid ** 2)
    direct = np.sum(-0.5 * np.log(2 * np.pi * var) - resid ** 2 / (2 * var))
    expected = direct - 0.5 * 4 * math.log(300)
    assert log_family_score(BIC, continuous(values), 2, [1, 0]) == pytest.approx(expected, rel=1e-9)


def _sequential_predictive(column, r, ess):
    """log of the product of successive Dirichlet predictive probabilities."""
    counts = np.zeros(r)
    total = 0.0
    for k in column:
        total += math.log((counts[k] + ess / r) / (counts.sum() + ess))
        counts[k] += 1
    return total


def test_bdeu_constant_column_closed_form():
    n = 37
    data = Dataset(("X", "Y"), np.zeros((n, 2), dtype=int), discrete=True, cardinalities=(2, 2))
    closed = math.lgamma(1) - math.lgamma(1 + n) + math.lgamma(0.5 + n) - math.lgamma(0.5)
    score = log_family_score(BDeu(1.0), data, 0, [])
    assert score == pytest.approx(closed, rel=1e-12)
    assert score == pytest.approx(_sequential_predictive(np.zeros(n, dtype=int), 2, 1.0), rel=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 1.0, 4.0]))
def test_bdeu_matches_sequential_prediction_with_parents(seed, ess):
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, [3, 2, 2], size=(60, 3))
    data = Dataset(("A", "B", "C"), vals, discrete=True, cardinalities=(3, 2, 2))
    # per parent configuration the child column is an independent Dirichlet-multinomial with ess / q
    q = 2 * 2
    expected = 0.0
    for b in range(2):
        for c in range(2):
            col = vals[(vals[:, 1] == b) & (vals[:, 2] == c), 0]
            expected += _sequential_predictive(col, 3, ess / q)
    assert log_family_score(BDeu(ess), data, 0, [1, 2]) == pytest.approx(expected, rel=1e-10)


def test_family_score_ignores_parent_listing(rng):
    _, data = random_instance(1)
    assert log_family_score(BIC, data, 0, [3, 1, 2]) == log_family_score(BIC, data, 0, [1, 2, 3])


def test_kind_mismatch(rng):
    _, data = random_instance(2)
    with pytest.raises(DataMismatch):
        log_family_score(BDeu(), data, 0, [])
    ddata = Dataset(("A",), np.zeros((5, 1), dtype=int), discrete=True)
    with pytest.raises(DataMismatch):
        Scorer(ddata, BIC)


def test_network_score_decomposes():
    d, data = random_instance(3)
    total = sum(log_family_score(BIC, data, v, d.parents(v)) for v in range(d.n_nodes))
    assert log_network_score(BIC, data, d) == pytest.approx(total, abs=1e-9)
    empty = Dag(d.n_nodes)
    assert log_network_score(BIC, data, empty) == pytest.approx(
        sum(log_family_score(BIC, data, v, []) for v in range(d.n_nodes)), abs=1e-9
    )


def test_reversal_of_single_edge_is_score_equivalent(rng):
    x = rng.standard_normal(400)
    y = 0.6 * x + rng.standard_normal(400)
    data = continuous(np.column_stack([x, y]))
    assert log_network_score(BIC, data, Dag(2, [(0, 1)])) == pytest.approx(
        log_network_score(BIC, data, Dag(2, [(1, 0)])), abs=1e-9
    )


def test_true_edge_preferred_over_empty():
    wins = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(1000)
        data = continuous(np.column_stack([x, 0.8 * x + rng.standard_normal(1000)]))
        wins += log_network_score(BIC, data, Dag(2, [(0, 1)])) > log_network_score(BIC, data, Dag(2))
    assert wins >= 95


@pytest.mark.parametrize("n", [3, 4])
def test_gaussian_bic_score_equivalent_within_classes(n):
    rng = np.random.default_rng(n)
    values = rng.standard_normal((300, n)) @ rng.standard_normal((n, n))
    scorer = Scorer(continuous(values), BIC)
    classes = defaultdict(list)
    for d in all_dags(n):
        classes[dag_to_essential(d)].append(scorer.network(d))
    for scores in classes.values():
        assert max(scores) - min(scores) <= 1e-9 * max(1.0, abs(scores[0]))


def test_bdeu_score_equivalent_on_reversal():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, 300)
    b = (a ^ (rng.random(300) < 0.2)).astype(int)
    data = Dataset(("A", "B"), np.column_stack([a, b]), discrete=True, cardinalities=(2, 2))
    s1 = log_network_score(BDeu(2.0), data, Dag(2, [(0, 1)]))
    s2 = log_network_score(BDeu(2.0), data, Dag(2, [(1, 0)]))
    assert s1 == pytest.approx(s2, abs=1e-9)


def test_delta_inverse_and_composition():
    d, data = random_instance(4)
    x, y = next((a, b) for a, b in combinations(range(6), 2) if not d.is_adjacent(a, b))
    try:
        added = apply_edit(d, Add(x, y))
    except InvalidEdit:
        x, y = y, x
        added = apply_edit(d, Add(x, y))
    assert delta_score(BIC, data, d, Add(x, y)) + delta_score(BIC, data, added, Del(x, y)) == 0.0
    a, b = sorted(d.directed)[0]
    try:
        apply_edit(d, Rev(a, b))
    except InvalidEdit:
        return
    deleted = apply_edit(d, Del(a, b))
    seq = delta_score(BIC, data, d, Del(a, b)) + delta_score(BIC, data, deleted, Add(b, a))
    assert delta_score(BIC, data, d, Rev(a, b)) == pytest.approx(seq, abs=1e-9)


def _applicable_edits(d):
    n = d.n_nodes
    ops = []
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            for op in (Add(x, y), Del(x, y), Rev(x, y)):
                try:
                    apply_edit(d, op)
                except InvalidEdit:
                    continue
                ops.append(op)
    return ops


@given(st.integers(0, 2**32 - 1))
def test_delta_equals_full_recomputation(seed):
    d, data = random_instance(seed)
    scorer = Scorer(data, BIC)
    base = scorer.network(d)
    for op in _applicable_edits(d):
        full = scorer.network(apply_edit(d, op)) - base
        assert scorer.delta(d, op) == pytest.approx(full, abs=1e-9)


def test_invalid_edits():
    d = Dag(3, [(0, 1), (1, 2)])
    _, data = random_instance(5, n=3)
    with pytest.raises(InvalidEdit):
        delta_score(BIC, data, d, Add(0, 1))
    with pytest.raises(InvalidEdit):
        delta_score(BIC, data, d, Del(0, 2))
    with pytest.raises(InvalidEdit):
        delta_score(BIC, data, d, Add(2, 0))
    with pytest.raises(InvalidEdit):
        delta_score(BIC, data, Dag(3, [(0, 1), (1, 2), (0, 2)]), Rev(0, 2))


def test_cache_hits_and_transparency():
    d, data = random_instance(6)
    cached = Scorer(data, BIC)
    first = cached.family(2, [0, 1])
    misses = cached.misses
    assert cached.family(2, [1, 0]) == first and cached.hits == 1 and cached.misses == misses
    cached.family(2, [0])
    assert cached.misses == misses + 1
    assert cached.network(d) == Scorer(data, BIC, cache=False).network(d)


def test_scores_invariant_to_record_order():
    d, data = random_instance(8)
    perm = np.random.default_rng(0).permutation(data.n_records)
    shuffled = Dataset(data.names, data.values[perm])
    assert log_network_score(BIC, shuffled, d) == pytest.approx(log_network_score(BIC, data, d), abs=1e-8)
