from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binom, chisquare

from egsearch.graph import Dag, has_directed_cycle
from egsearch.independence import d_separated, fisher_z_test
from egsearch.simulation import (
    BETA_HIGH,
    BETA_LOW,
    GeneratorConfig,
    draw_sem_params,
    generate,
    random_dag,
    random_dag_from_config,
    sample_linear_sem,
)


def test_zero_and_full_density(rng):
    for _ in range(20):
        assert random_dag_from_config(GeneratorConfig(7, 0), rng).n_edges() == 0
        full = random_dag_from_config(GeneratorConfig(7, 21), rng)
        assert full.n_edges() == 21 and not has_directed_cycle(full)


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(4, 7)
    with pytest.raises(ValueError):
        GeneratorConfig(4, -1)
    with pytest.raises(ValueError):
        GeneratorConfig(0, 0)
    assert GeneratorConfig(15, 22).edge_probability == pytest.approx(22 / 105)


def test_mean_edge_count_fifteen_nodes(rng):
    counts = [random_dag_from_config(GeneratorConfig(15, 22), rng).n_edges() for _ in range(1000)]
    assert 21 <= np.mean(counts) <= 23


def test_edge_count_distribution_is_binomial():
    rng = np.random.default_rng(2024)
    cfg = GeneratorConfig(15, 22)
    counts = np.array([random_dag_from_config(cfg, rng).n_edges() for _ in range(1000)])
    dist = binom(105, cfg.edge_probability)
    # bins with pooled tails so every expected count is at least 5
    edges = [-1, 14, 16, 18, 20, 22, 24, 26, 28, 30, 105]
    observed = np.histogram(counts, bins=np.array(edges) + 0.5)[0]
    expected = 1000 * np.diff(dist.cdf(edges))
    expected *= observed.sum() / expected.sum()
    assert expected.min() >= 5
    assert chisquare(observed, expected).pvalue > 0.01


@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.floats(0, 1))
def test_random_dag_always_acyclic(seed, n, p):
    d = random_dag(n, p, np.random.default_rng(seed))
    assert not has_directed_cycle(d) and d.n_nodes == n


def test_sem_params_range_and_mean(rng):
    assert draw_sem_params(Dag(4), rng) == {}
    d = random_dag(150, 1.0, rng)
    betas = np.array(list(draw_sem_params(d, rng).values()))
    assert len(betas) == 150 * 149 // 2
    assert np.all((betas > BETA_LOW) & (betas < BETA_HIGH))
    assert abs(betas[:10000].mean() - 0.5) <= 0.01


def test_single_node_is_standard_normal(rng):
    col = sample_linear_sem(Dag(1), {}, 10000, rng).values[:, 0]
    assert abs(col.mean()) < 0.05
    assert abs(col.var() - 1) < 0.05


@pytest.mark.parametrize("beta", [0.1, 0.5, 0.9])
def test_single_edge_correlation(beta, rng):
    data = sample_linear_sem(Dag(2, [(0, 1)]), {(0, 1): beta}, 10000, rng)
    r = np.corrcoef(data.values.T)[0, 1]
    assert r == pytest.approx(beta / np.sqrt(beta ** 2 + 1), abs=0.02)


def test_additive_parents_and_no_rescaling(rng):
    d = Dag(3, [(0, 2), (1, 2)])
    data = sample_linear_sem(d, {(0, 2): 0.6, (1, 2): 0.8}, 20000, rng)
    assert data.values[:, 2].var() == pytest.approx(1 + 0.36 + 0.64, rel=0.05)
    coef = np.linalg.lstsq(data.values[:, :2], data.values[:, 2], rcond=None)[0]
    assert coef == pytest.approx([0.6, 0.8], abs=0.03)


def test_missing_coefficients_rejected(rng):
    with pytest.raises(ValueError):
        sample_linear_sem(Dag(2, [(0, 1)]), {}, 10, rng)


def test_generate_is_deterministic():
    a = generate(GeneratorConfig(8, 12, seed=5), 100)
    b = generate(GeneratorConfig(8, 12, seed=5), 100)
    assert a[0] == b[0] and a[1] == b[1]
    assert a[2].values.tobytes() == b[2].values.tobytes()
    c = generate(GeneratorConfig(8, 12, seed=6), 100)
    assert c[2].values.tobytes() != a[2].values.tobytes()


def test_generated_data_is_faithful_to_its_dag():
    agree = total = 0
    for seed in range(20):
        truth, _, data = generate(GeneratorConfig(6, 7, seed=seed), 5000)
        for x, y in combinations(range(6), 2):
            rest = [v for v in range(6) if v not in (x, y)]
            for k in range(3):
                for S in combinations(rest, k):
                    total += 1
                    indep = fisher_z_test(data, x, y, S, 0.01).independent
                    agree += indep == d_separated(truth, x, y, S)
    assert agree / total >= 0.90
