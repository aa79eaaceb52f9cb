"""Greedy Wasserstein reweighing of hypercube datasets, with an exact oracle and bound checks."""

from __future__ import annotations

from wassreweigh.distribution import WeightedDistribution, spread
from wassreweigh.exact_oracle import exact_min_matching, exact_w1
from wassreweigh.greedy_match import capacity_greedy, greedy_match
from wassreweigh.hypercube import Point, hamming_distance, parse_point
from wassreweigh.ot_reduce import ReweighConfig, greedy_reweigh, greedy_w1
from wassreweigh.pipeline import reweigh_pipeline

__version__ = "0.1.0"

__all__ = [
    "Point",
    "ReweighConfig",
    "WeightedDistribution",
    "capacity_greedy",
    "exact_min_matching",
    "exact_w1",
    "greedy_match",
    "greedy_reweigh",
    "greedy_w1",
    "hamming_distance",
    "parse_point",
    "reweigh_pipeline",
    "spread",
]
