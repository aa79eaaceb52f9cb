"""Empirical distributions from i.i.d. draws, and the sampling concentration experiment."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from wassreweigh._parallel import ordered_map
from wassreweigh.distribution import WeightedDistribution, spread
from wassreweigh.exact_oracle import DEFAULT_SUPPORT_CAP, exact_w1
from wassreweigh.ot_reduce import greedy_w1

ESTIMATORS = ("exact", "greedy")


def _generator(seed: int, stream: int) -> np.random.Generator:
    # Philox is counter based: the key pins (seed, stream), draw i sits at counter i
    return np.random.Generator(np.random.Philox(key=(seed % 2**64) | ((stream % 2**64) << 64)))


def sample_counts(P: WeightedDistribution, m: int, seed: int, stream: int = 0) -> np.ndarray:
    """How many of ``m`` with-replacement draws from ``P`` land on each support point."""
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    u = _generator(seed, stream).random(m)
    cdf = np.cumsum(P.weights)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, u, side="right")
    np.minimum(idx, len(P) - 1, out=idx)
    return np.bincount(idx, minlength=len(P))


def random_sample(P: WeightedDistribution, m: int, seed: int, stream: int = 0) -> WeightedDistribution:
    """Empirical distribution of ``m`` draws from ``P``.

    The result lives on the drawn points only, in ``P``'s order and with its
    ids; each weight is a draw count divided by ``m``.
    """
    counts = sample_counts(P, m, seed, stream)
    keep = np.nonzero(counts)[0]
    return WeightedDistribution(
        tuple(P.points[i] for i in keep),
        tuple(P.ids[i] for i in keep),
        counts[keep] / m,
    )


@dataclass(frozen=True)
class SampleExperimentReport:
    m: int
    trials: int
    w1_values: tuple[float, ...]
    threshold: float
    exceed_fraction: float
    estimator: str

    @property
    def median(self) -> float:
        return float(np.median(self.w1_values))

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "trials": self.trials,
            "estimator": self.estimator,
            "threshold": self.threshold,
            "exceed_fraction": self.exceed_fraction,
            "median_w1": self.median,
            "w1_values": list(self.w1_values),
        }


def concentration_threshold(P: WeightedDistribution, epsilon_slack: float = 0.1) -> float:
    """``ln ln n + epsilon_slack * spread(P)`` with n the support size.

    The log-log term is dropped for n <= e, where it is not positive.
    """
    n = int(np.count_nonzero(P.weights))
    loglog = math.log(math.log(n)) if n > math.e else 0.0
    return loglog + epsilon_slack * spread(P).spread


def concentration_experiment(
    P: WeightedDistribution,
    m_values: Sequence[int],
    trials: int,
    seed: int,
    estimator: str = "exact",
    epsilon_slack: float = 0.1,
    exact_cap: int = DEFAULT_SUPPORT_CAP,
) -> list[SampleExperimentReport]:
    """W1 between ``P`` and the empirical measure of m draws, over many trials.

    Trial t at sample size m draws from stream ``t`` under key ``seed + m``,
    so every (m, t) cell is reproducible on its own.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    if trials < 1:
        raise ValueError("need at least one trial")
    threshold = concentration_threshold(P, epsilon_slack)
    reports = []
    for m in m_values:

        def one_trial(t: int, m: int = m) -> float:
            sample = random_sample(P, m, seed + m, stream=t)
            if estimator == "exact":
                return exact_w1(sample, P, cap=exact_cap)
            return greedy_w1(sample, P)

        values = tuple(ordered_map(one_trial, list(range(trials))))
        exceed = sum(v >= threshold for v in values) / trials
        reports.append(SampleExperimentReport(int(m), trials, values, threshold, exceed, estimator))
    return reports


def write_curve_csv(path: str | Path, reports: Sequence[SampleExperimentReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["m", "trial", "w1"])
        for rep in reports:
            for t, v in enumerate(rep.w1_values):
                writer.writerow([rep.m, t, f"{v:.9f}"])
