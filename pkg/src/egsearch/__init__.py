"""Hybrid constraint-based/Bayesian causal structure search.

PC runs under randomised significance levels and test orderings (EGS), its
greedy-refined variant (EGS/GS), and plain greedy search with restarts
(GS, GS/1), plus the simulation and evaluation tooling to compare them.
"""
from .data import Dataset, read_csv
from .equivalence import (
    CyclicRejection,
    NoExtension,
    canonical_encoding,
    consistent_extension,
    dag_to_essential,
    meek_closure,
    orient_v_structures,
)
from .evaluation import (
    ExperimentSpec,
    StructuralDiff,
    count_distinct_essential_graphs,
    run_experiment,
    structural_diff,
    total_error,
)
from .graph import Dag, MixedGraph, has_directed_cycle, skeleton, topological_order
from .independence import DSepOracle, FisherZTest, GSquareTest, dsep_oracle, fisher_z_test, gsquare_test
from .pc import PcOutput, run_pc
from .scoring import BDeu, GaussianBIC, Scorer, delta_score, log_family_score, log_network_score
from .search import SearchConfig, ScoredStructure, greedy_search, run_egs, run_egs_gs, run_gs, run_gs1
from .simulation import GeneratorConfig, draw_sem_params, generate, random_dag, sample_linear_sem

__version__ = "0.1.0"
