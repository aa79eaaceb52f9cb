"""Tilted supply/demand reweighing by greedy transport, and the greedy W1 estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wassreweigh.distribution import (
    DistributionError,
    WeightedDistribution,
    check_same_dimension,
    normalize,
    rounding_error_bound,
    scale_to_multiplicities,
)
from wassreweigh.greedy_match import TIE_BREAKS, VARIANTS, TransportPlan, bipartite_distances, capacity_greedy

SCALE_TARGET = 1e4
SCALE_CAP = 10**8


class AllDemandsClampedError(DistributionError):
    """Every demand was clamped to zero, so nothing can be reweighed."""


class NoSupplyError(DistributionError):
    """Scaled supply rounds to zero units everywhere."""


@dataclass(frozen=True)
class ReweighConfig:
    alpha: float
    m: int
    seed: int = 0
    C: int | None = None
    tie_break: str = "lex"
    variant: str = "global"

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.m < 1:
            raise ValueError(f"sample size m must be >= 1, got {self.m}")
        if self.C is not None and (int(self.C) != self.C or self.C < 1):
            raise ValueError(f"scale C must be a positive integer, got {self.C}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown greedy variant {self.variant!r}")


def default_scale(*dists: WeightedDistribution) -> int:
    """``ceil(1e4 / smallest positive weight)``, capped at 1e8."""
    smallest = min(d.min_positive_weight() for d in dists)
    return int(min(math.ceil(SCALE_TARGET / smallest), SCALE_CAP))


@dataclass(frozen=True)
class ReweighResult:
    distribution: WeightedDistribution
    supply: np.ndarray
    demand: np.ndarray
    met: np.ndarray
    plan: TransportPlan
    C: int

    @property
    def met_fraction(self) -> float:
        """Met demand as a fraction of total (clamped) demand."""
        total = int(self.demand.sum())
        return float(self.met.sum()) / total if total else 0.0

    @property
    def leftover_supply(self) -> int:
        return int(self.supply.sum()) - self.plan.moved_mass


def greedy_reweigh(
    P_B: WeightedDistribution,
    P_R: WeightedDistribution,
    alpha: float,
    C: int | None = None,
    tie_break: str = "lex",
    variant: str = "global",
) -> ReweighResult:
    """Reweigh ``P_B`` toward ``P_R`` by greedy transport of tilted masses.

    Supply at r is ``C * alpha * P_R(r)``; demand at b is
    ``C - C * (1 - alpha) * P_B(b)`` clamped at zero, both rounded to whole
    units.  The demand each b actually receives, normalized, is the result.
    Supply beyond total demand is left unshipped.
    """
    check_same_dimension(P_B, P_R)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"greedy reweighing needs alpha in (0, 1], got {alpha}")
    C = default_scale(P_B, P_R) if C is None else int(C)
    if C < 1:
        raise ValueError(f"scale C must be a positive integer, got {C}")
    supply = np.rint(C * alpha * P_R.weights).astype(np.int64)
    demand = np.rint(C - C * (1.0 - alpha) * P_B.weights).astype(np.int64)
    np.maximum(demand, 0, out=demand)
    if demand.sum() == 0:
        raise AllDemandsClampedError("all demands clamp to zero")
    if supply.sum() == 0:
        raise NoSupplyError(f"no supply survives scaling by C={C}; increase C")
    D = bipartite_distances(P_R.packed, P_B.packed)
    plan = capacity_greedy(P_R.points, supply, P_B.points, demand, tie_break, variant, distances=D)
    met = plan.received(len(P_B))
    weights = normalize(met)
    out = WeightedDistribution(P_B.points, P_B.ids, weights)
    return ReweighResult(out, supply, demand, met, plan, C)


def greedy_w1_plan(
    P: WeightedDistribution,
    Q: WeightedDistribution,
    C: int | None = None,
    tie_break: str = "lex",
    variant: str = "global",
) -> tuple[float, TransportPlan, int]:
    check_same_dimension(P, Q)
    C = default_scale(P, Q) if C is None else int(C)
    a = scale_to_multiplicities(P, C)
    b = scale_to_multiplicities(Q, C)
    if a.sum() == 0 or b.sum() == 0:
        raise NoSupplyError(f"a side rounds to zero units at C={C}; increase C")
    D = bipartite_distances(P.packed, Q.packed)
    plan = capacity_greedy(P.points, a, Q.points, b, tie_break, variant, distances=D)
    return plan.cost / C, plan, C


def greedy_w1(
    P: WeightedDistribution,
    Q: WeightedDistribution,
    C: int | None = None,
    tie_break: str = "lex",
    variant: str = "global",
) -> float:
    """Greedy transport cost between ``P`` and ``Q`` scaled by C, divided by C."""
    return greedy_w1_plan(P, Q, C, tie_break, variant)[0]


def combined_rounding_bound(P: WeightedDistribution, Q: WeightedDistribution, C: int) -> float:
    """Sum of the per-side scaling errors ``1 / (C * min P) + 1 / (C * min Q)``."""
    return rounding_error_bound(P, C) + rounding_error_bound(Q, C)
