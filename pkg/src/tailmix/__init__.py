"""Nonparametric inference on two-component mixtures under tail restrictions."""

from .data import Observation, Partition, Sample, TuningConstants, ingest_csv, subset_view
from .empirical import OrderStatCuts, ecdf, order_stats
from .mixture import (
    ComponentCdfEstimate,
    MixingProportionEstimate,
    component_cdf_one_sided,
    component_cdfs,
    jacobians,
    lambda_hat,
)
from .spec_test import SpecTestResult, run_spec_test, run_spec_tests, weighted_mean_cdf
from .tail_ratio import TailRatioEstimate, zeta_minus_hat, zeta_plus_hat
from .tuning import CutSelection, cut_counts, pareto_rate_exponent

__version__ = "0.1.0"

__all__ = [
    "ComponentCdfEstimate", "CutSelection", "MixingProportionEstimate", "Observation",
    "OrderStatCuts", "Partition", "Sample", "SpecTestResult", "TailRatioEstimate",
    "TuningConstants", "component_cdf_one_sided", "component_cdfs", "cut_counts", "ecdf",
    "ingest_csv", "jacobians", "lambda_hat", "order_stats", "pareto_rate_exponent",
    "run_spec_test", "run_spec_tests", "subset_view", "weighted_mean_cdf", "zeta_minus_hat",
    "zeta_plus_hat",
]
