"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL ...`` line; the lines are
printed in the pytest terminal summary and when this file is run directly.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from conftest import brute_force_matching, duplicated_greedy, random_distribution, random_points, uniform_multiset

from wassreweigh.analysis import (
    alternating_cycles,
    approx_bound,
    bound_exponent,
    check_structural_lemma,
    measured_ratio,
    ratio_ceiling,
)
from wassreweigh.datasets import format_weights, read_dataset, write_dataset
from wassreweigh.distribution import scale_to_multiplicities
from wassreweigh.exact_oracle import exact_min_matching, exact_w1
from wassreweigh.generators import GenSpec, gen_adversarial, gen_clustered
from wassreweigh.greedy_match import (
    bipartite_distances,
    capacity_greedy,
    greedy_match,
    matching_violations,
    plan_violations,
)
from wassreweigh.ot_reduce import NoSupplyError, ReweighConfig, combined_rounding_bound, greedy_w1, greedy_w1_plan
from wassreweigh.pipeline import PipelineOptions, reweigh_pipeline
from wassreweigh.sampler import concentration_experiment

RESULTS: dict[int, str] = {}

CAMPAIGN_SIZE = 1000
CAMPAIGN_SEED = 1
AXIOM_TOL = 1e-9

# max greedy/exact ratio over held-out clustered seeds 1000..1009 divided by
# 64 ** bound_exponent(2); measured once (1.05244 / 17.234) and rounded up
K_FROZEN = 0.06107
HELD_OUT_SEEDS = range(1000, 1010)

ADVERSARIAL_RATIOS = {1: 1.0, 2: 1.5, 3: 2.5, 4: 4.125, 5: 6.625}

# greedy matchings from criteria 2 and 5, checked in criterion 6
EDGE_PROPERTY_LOG: dict[str, int] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[n] = line
    print(line, flush=True)


@dataclass
class Instance:
    d: int
    R: list
    B: list
    Z: list


@pytest.fixture(scope="module")
def campaign() -> list[Instance]:
    rng = np.random.default_rng(CAMPAIGN_SEED)
    out = []
    for _ in range(CAMPAIGN_SIZE):
        d = int(rng.integers(1, 7))
        n = int(rng.integers(1, 7))
        out.append(
            Instance(d, random_points(rng, n, d), random_points(rng, n, d), random_points(rng, int(rng.integers(1, 7)), d))
        )
    return out


def test_criterion_1_oracle_optimality(campaign):
    t0 = time.perf_counter()
    mismatches = axiom_failures = 0
    worst = 0.0
    for inst in campaign:
        if exact_min_matching(inst.R, inst.B).cost != brute_force_matching(inst.R, inst.B):
            mismatches += 1
        P, Q, Z = uniform_multiset(inst.R, "p"), uniform_multiset(inst.B, "q"), uniform_multiset(inst.Z, "z")
        pq, qp = exact_w1(P, Q), exact_w1(Q, P)
        pz, qz, pp = exact_w1(P, Z), exact_w1(Q, Z), exact_w1(P, P)
        same = dict(zip(P.points, P.weights)) == dict(zip(Q.points, Q.weights))
        checks = [
            pq >= -AXIOM_TOL,
            abs(pp) <= AXIOM_TOL,
            (pq <= AXIOM_TOL) == same,
            abs(pq - qp) <= AXIOM_TOL,
            pz <= pq + qz + AXIOM_TOL,
        ]
        worst = max(worst, abs(pq - qp), pz - pq - qz, abs(pp))
        axiom_failures += not all(checks)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and axiom_failures == 0 and elapsed < 30
    record(
        1,
        ok,
        f"matching mismatches={mismatches} axiom failures={axiom_failures} worst slack={worst:.3g} time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_2_ratio_ceiling(campaign):
    over = 0
    worst_gap = -math.inf
    violations = 0
    for inst in campaign:
        D = bipartite_distances(inst.R, inst.B)
        g = greedy_match(inst.R, inst.B, distances=D)
        o = exact_min_matching(inst.R, inst.B, distances=D).matching
        ratio = measured_ratio(g.total_weight, o.total_weight)
        ceiling = ratio_ceiling(alternating_cycles(g, o))
        worst_gap = max(worst_gap, ratio - ceiling)
        over += ratio > ceiling + 1e-9
        violations += len(matching_violations(g, D))
    EDGE_PROPERTY_LOG["criterion 2 matchings"] = violations
    ok = over == 0
    record(2, ok, f"instances over ceiling={over} max(ratio - ceiling)={worst_gap:.4f}")
    assert ok


def test_criterion_3_structural_lemma(campaign):
    checked = failures = 0
    for inst in campaign:
        g = greedy_match(inst.R, inst.B)
        o = exact_min_matching(inst.R, inst.B).matching
        for cycle in alternating_cycles(g, o).cycles:
            if cycle.optimal_weight == 0 or cycle.alpha <= 1:
                continue
            checked += 1
            rep = check_structural_lemma(cycle, inst.R, inst.B, inst.d)
            failures += not rep.holds
    ok = failures == 0 and checked > 0
    record(3, ok, f"cycles with alpha > 1 checked={checked} violations={failures}")
    assert ok


def test_criterion_4_duplication_equivalence():
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(500):
        d = int(rng.integers(1, 6))
        C = int(rng.integers(1, 9))
        while True:
            p = random_distribution(rng, d, int(rng.integers(1, 6)))
            q = random_distribution(rng, d, int(rng.integers(1, 6)))
            a, b = scale_to_multiplicities(p, C), scale_to_multiplicities(q, C)
            if a.sum() > 0:
                break
        plan = capacity_greedy(p.points, a, q.points, b)
        mismatches += plan.aggregated() != duplicated_greedy(p.points, a, q.points, b)
    ok = mismatches == 0
    record(4, ok, f"instances=500 mismatches={mismatches}")
    assert ok


def _clustered_ratio(seed: int) -> tuple[float, int]:
    S, T = gen_clustered(GenSpec(d=64, n=2000, eta=4, zeta=2, seed=seed))
    g, plan, _ = greedy_w1_plan(S, T)
    D = bipartite_distances(S.packed, T.packed)
    return g / exact_w1(S, T), len(plan_violations(plan, D))


def test_criterion_5_bounded_instances():
    t0 = time.perf_counter()
    d, zeta = 64, 2
    recalibrated = max(_clustered_ratio(s)[0] for s in HELD_OUT_SEEDS) / d ** bound_exponent(2.0)
    bound = approx_bound(4, zeta, d, 2.0, K=K_FROZEN)
    ratios, violations = [], 0
    for seed in range(50):
        r, v = _clustered_ratio(seed)
        ratios.append(r)
        violations += v
    EDGE_PROPERTY_LOG["criterion 5 plans"] = violations
    elapsed = time.perf_counter() - t0
    worst = max(ratios)
    ok = worst <= bound and worst <= 2 * zeta and elapsed < 300 and recalibrated <= K_FROZEN
    record(
        5,
        ok,
        f"max ratio={worst:.4f} bound={bound:.4f} (K={K_FROZEN}, held-out K={recalibrated:.5f}) time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_greedy_edge_property(campaign):
    if "criterion 2 matchings" not in EDGE_PROPERTY_LOG:
        test_criterion_2_ratio_ceiling(campaign)
    if "criterion 5 plans" not in EDGE_PROPERTY_LOG:
        EDGE_PROPERTY_LOG["criterion 5 plans"] = sum(_clustered_ratio(s)[1] for s in range(50))
    total = sum(EDGE_PROPERTY_LOG.values())
    ok = total == 0
    record(6, ok, " ".join(f"{k}: {v} violations;" for k, v in EDGE_PROPERTY_LOG.items()))
    assert ok


def test_criterion_7_sampling_concentration():
    t0 = time.perf_counter()
    # 10^4 draws; repeated draws merge, so the support is smaller than 10^4
    S, _ = gen_clustered(GenSpec(d=64, n=10_000, eta=4, zeta=2, seed=7, distinct=False))
    reports = concentration_experiment(S, [250, 1000, 4000], trials=20, seed=7, estimator="exact")
    medians = [r.median for r in reports]
    top = max(max(r.w1_values) for r in reports)
    elapsed = time.perf_counter() - t0
    ok = medians[0] > medians[1] > medians[2] and top <= 64 and elapsed < 120
    record(
        7,
        ok,
        f"support={len(S)} medians={[round(m, 4) for m in medians]} max trial={top:.4f} time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_adversarial_growth():
    ratios = {}
    for k in range(1, 6):
        S, T = gen_adversarial(k)
        R, B = list(S.points), list(T.points)
        g = greedy_w1(S, T)
        e = exact_w1(S, T)
        # unit instance: the unit matchings must agree with the transport values
        assert g == pytest.approx(greedy_match(R, B).total_weight / len(R))
        assert e == pytest.approx(exact_min_matching(R, B).cost / len(R))
        ratios[k] = g / e
    monotone = all(ratios[k] <= ratios[k + 1] for k in range(1, 5))
    pinned = all(ratios[k] == pytest.approx(v, abs=1e-9) for k, v in ADVERSARIAL_RATIOS.items())
    ok = monotone and ratios[4] > 1.3 and pinned
    record(8, ok, f"ratios={ {k: round(v, 4) for k, v in ratios.items()} }")
    assert ok


def _cli(args: list[str], threads: str | None = None) -> subprocess.CompletedProcess:
    env = dict(os.environ)
    if threads is not None:
        env["WASS_THREADS"] = threads
    return subprocess.run([sys.executable, "-m", "wassreweigh", *args], capture_output=True, text=True, env=env)


@pytest.fixture(scope="module")
def pipeline_files(tmp_path_factory) -> tuple[Path, Path]:
    base = tmp_path_factory.mktemp("c9")
    S, T = gen_clustered(GenSpec(d=64, n=1000, eta=4, zeta=2, seed=9))
    write_dataset(base / "S.tsv", S)
    write_dataset(base / "T.tsv", T)
    return base / "S.tsv", base / "T.tsv"


def test_criterion_9_pipeline_endpoints(pipeline_files, tmp_path):
    src, tgt = pipeline_files
    common = ["reweigh", "--source", str(src), "--target", str(tgt), "--sample-size", "400", "--seed", "5"]

    zero = tmp_path / "zero.jsonl"
    assert _cli([*common, "--alpha", "0", "--out", str(zero)]).returncode == 0
    identity = zero.read_text() == format_weights(read_dataset(src))

    outs = []
    for threads in ("1", "8"):
        w, r = tmp_path / f"w{threads}.jsonl", tmp_path / f"r{threads}.json"
        res = _cli([*common, "--alpha", "0.5", "--out", str(w), "--report", str(r)], threads)
        assert res.returncode == 0, res.stderr
        outs.append((w.read_bytes(), r.read_bytes()))
    deterministic = outs[0] == outs[1]

    S = read_dataset(src)
    out, rep = reweigh_pipeline(S, S, ReweighConfig(alpha=1.0, m=400, seed=5), PipelineOptions(diagnostics=False))
    value = greedy_w1(out.restrict_positive(), S, rep.scale)
    limit = 2.0 / (rep.scale * S.min_positive_weight())
    fixed_point = value <= limit

    ok = identity and deterministic and fixed_point
    record(
        9,
        ok,
        f"alpha=0 identical={identity}; WASS_THREADS 1 vs 8 identical={deterministic}; "
        f"alpha=1,T=S greedy_w1(P_S', P_S)={value:.6f} vs 2/(C min w)={limit:.3g}",
    )
    assert identity and deterministic, "endpoint identity or determinism failed"
    assert fixed_point, (
        "alpha=1 with T=S: P_S' equals the with-replacement sample of S, so its distance to P_S is the "
        "sampling error, not a rounding error"
    )


def test_criterion_10_rounding_bound():
    rng = np.random.default_rng(10)
    failures = done = 0
    worst = 0.0
    while done < 100:
        d = int(rng.integers(1, 9))
        p = random_distribution(rng, d, int(rng.integers(1, 9)), "p")
        q = random_distribution(rng, d, int(rng.integers(1, 9)), "q")
        C = int(rng.integers(10, 1000))
        try:
            diff = abs(greedy_w1(p, q, C) - greedy_w1(p, q, 2 * C))
        except NoSupplyError:
            continue
        bound = combined_rounding_bound(p, q, C)
        worst = max(worst, diff / bound)
        failures += diff > bound
        done += 1
    ok = failures == 0
    record(10, ok, f"pairs=100 violations={failures} worst |diff|/bound={worst:.3f}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
