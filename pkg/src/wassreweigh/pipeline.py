"""End-to-end reweighing: sample both sides, greedy-reweigh the source sample, mix."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from wassreweigh.covering import greedy_cover
from wassreweigh.distribution import WeightedDistribution, check_same_dimension, rounding_error_bound, spread
from wassreweigh.ot_reduce import ReweighConfig, default_scale, greedy_reweigh, greedy_w1
from wassreweigh.sampler import random_sample

log = logging.getLogger(__name__)

MIX_TOL = 1e-9


@dataclass
class RunReport:
    config: dict
    source_size: int
    target_size: int
    sampled_source_size: int = 0
    sampled_target_size: int = 0
    scale: int | None = None
    met_demand_fraction: float | None = None
    leftover_supply: int | None = None
    moved_units: int | None = None
    greedy_w1_before: float | None = None
    greedy_w1_after: float | None = None
    rounding_bound: float | None = None
    covering: dict | None = None
    spread_source: float | None = None
    spread_target: float | None = None
    renormalized: bool = False
    short_circuit: bool = False
    timing: dict = field(default_factory=dict)

    def as_dict(self, timings: bool = False) -> dict:
        out = asdict(self)
        if not timings:
            out.pop("timing")
        return out


@dataclass(frozen=True)
class PipelineOptions:
    target_seed: int | None = None
    diagnostics: bool = True
    cover_zeta: int = 4


def mix(P_S: WeightedDistribution, P_RS_prime: WeightedDistribution, alpha: float) -> tuple[WeightedDistribution, bool]:
    """``(1 - alpha) * P_S + alpha * P_RS_prime`` on the support of ``P_S``.

    Returns the mixture and whether a final uniform rescale was needed.
    """
    where = {p: k for k, p in enumerate(P_S.points)}
    lifted = np.zeros(len(P_S))
    for p, w in zip(P_RS_prime.points, P_RS_prime.weights.tolist()):
        k = where.get(p)
        if k is None:
            raise ValueError(f"reweighed point {p} is not in the source support")
        lifted[k] = w
    mixed = (1.0 - alpha) * P_S.weights + alpha * lifted
    total = math.fsum(mixed.tolist())
    renormalized = abs(total - 1.0) > MIX_TOL
    if renormalized:
        log.info("mixture drifted to total %.17g; rescaling", total)
        mixed = mixed / total
    return WeightedDistribution(P_S.points, P_S.ids, mixed), renormalized


def reweigh_pipeline(
    S: WeightedDistribution,
    T: WeightedDistribution,
    config: ReweighConfig,
    options: PipelineOptions = PipelineOptions(),
) -> tuple[WeightedDistribution, RunReport]:
    """Reweigh ``S`` toward ``T`` with tilt ``config.alpha``.

    alpha = 0 returns ``S`` unchanged.  Otherwise m points are drawn (with
    replacement) from each side, the source sample is greedily reweighed
    against the target sample, and the result is mixed back into ``S``.
    """
    check_same_dimension(S, T)
    cfg = asdict(config)
    cfg["target_seed"] = config.seed if options.target_seed is None else options.target_seed
    report = RunReport(config=cfg, source_size=len(S), target_size=len(T))
    clock = time.perf_counter

    if config.alpha == 0.0:
        report.short_circuit = True
        return S, report

    t0 = clock()
    P_RS = random_sample(S, config.m, config.seed)
    P_RT = random_sample(T, config.m, cfg["target_seed"])
    report.sampled_source_size = len(P_RS)
    report.sampled_target_size = len(P_RT)
    report.timing["sample"] = clock() - t0

    t0 = clock()
    res = greedy_reweigh(P_RS, P_RT, config.alpha, config.C, config.tie_break, config.variant)
    report.scale = res.C
    report.met_demand_fraction = res.met_fraction
    report.leftover_supply = res.leftover_supply
    report.moved_units = res.plan.moved_mass
    report.timing["greedy_reweigh"] = clock() - t0

    t0 = clock()
    out, report.renormalized = mix(S, res.distribution, config.alpha)
    report.timing["mix"] = clock() - t0

    if options.diagnostics:
        t0 = clock()
        C = default_scale(S, T, out.restrict_positive())
        report.greedy_w1_before = greedy_w1(S, T, C)
        report.greedy_w1_after = greedy_w1(out.restrict_positive(), T, C)
        report.rounding_bound = rounding_error_bound(out.restrict_positive(), C) + rounding_error_bound(T, C)
        report.timing["w1_diagnostics"] = clock() - t0

        t0 = clock()
        cover = greedy_cover(list(S.points) + list(T.points), options.cover_zeta)
        report.covering = cover.as_dict()
        report.spread_source = spread(S).spread
        report.spread_target = spread(T).spread
        report.timing["covering"] = clock() - t0
    return out, report
