from __future__ import annotations

import itertools
import sys
from collections import Counter

import numpy as np
import pytest

from wassreweigh.distribution import WeightedDistribution
from wassreweigh.hypercube import Point, hamming_distance


def random_points(rng: np.random.Generator, n: int, d: int) -> list[Point]:
    """n points of Q_d drawn with replacement."""
    return [Point(int(v), d) for v in rng.integers(0, 2**d, size=n)]


def random_distribution(rng: np.random.Generator, d: int, n: int, prefix: str = "x") -> WeightedDistribution:
    n = min(n, 2**d)
    vals = rng.choice(2**d, size=n, replace=False)
    w = rng.dirichlet(np.ones(n))
    return WeightedDistribution(
        tuple(Point(int(v), d) for v in vals), tuple(f"{prefix}{i}" for i in range(n)), w / w.sum()
    )


def uniform_multiset(points: list[Point], prefix: str = "u") -> WeightedDistribution:
    counts = Counter(points)
    pts = list(counts)
    return WeightedDistribution.from_counts(pts, [counts[p] for p in pts], [f"{prefix}{i}" for i in range(len(pts))])


def brute_force_matching(R: list[Point], B: list[Point]) -> int:
    return min(
        sum(hamming_distance(r, B[j]) for r, j in zip(R, perm)) for perm in itertools.permutations(range(len(B)))
    )


def duplicated_greedy(supply_points, supply_counts, demand_points, demand_counts):
    """Explicit unit duplication followed by the unit greedy, aggregated by owner."""
    from wassreweigh.greedy_match import aggregate_matching, expand_units, greedy_match

    R, r_owner = expand_units(supply_points, supply_counts)
    B, b_owner = expand_units(demand_points, demand_counts)
    return aggregate_matching(greedy_match(R, B), r_owner, b_owner)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
