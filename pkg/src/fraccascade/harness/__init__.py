"""Synthetic workloads, experiments and the command-line driver."""

from .distributions import Distribution, trial_rng
from .experiments import (
    count_maxima,
    experiment_discrepancy_sum,
    experiment_graph_check,
    experiment_maxima_count,
    experiment_nn_check,
    experiment_nn_scaling,
    harmonic,
    linear_scan_nn,
)
from .report import ExperimentReport, parse_csv_records, summarize
