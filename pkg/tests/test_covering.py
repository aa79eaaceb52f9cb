from __future__ import annotations

import itertools

import pytest
from conftest import random_points

from wassreweigh.covering import (
    greedy_cover,
    greedy_packing,
    greedy_packing_indices,
    is_cover,
    max_packing,
    min_cover,
)
from wassreweigh.generators import GenSpec, clustered_centers, gen_clustered
from wassreweigh.hypercube import hamming_distance, parse_point


def P(s: str):
    return parse_point(s, len(s), "bin")


def test_cover_examples():
    pts = [P("0000"), P("0001"), P("0011")]
    assert greedy_cover(pts, 2).eta == 1
    assert greedy_cover([P("000"), P("111")], 1).eta == 2


def test_packing_examples():
    assert greedy_packing([P("010")], 1) == 1
    assert greedy_packing([P("000"), P("111")], 2) == 2
    pts = [P("000"), P("001"), P("011")]
    assert greedy_packing(pts, 2) == 2
    assert max_packing(pts, 2) == 2


def test_cover_certificate_and_report(rng):
    for _ in range(100):
        d = int(rng.integers(1, 9))
        pts = list(dict.fromkeys(random_points(rng, int(rng.integers(1, 12)), d)))
        zeta = int(rng.integers(0, d + 1))
        rep = greedy_cover(pts, zeta)
        assert is_cover(pts, rep.centers, zeta)
        assert rep.max_center_distance <= zeta
        assert set(rep.centers) <= set(pts)
        # farthest-first starts at the lexicographically smallest point
        assert rep.centers[0] == min(pts)
        assert rep.eta >= min_cover(pts, zeta)
        chosen = [pts[i] for i in greedy_packing_indices(pts, rep.packing_radius)]
        assert len(chosen) == rep.packing_count
        for a, b in itertools.combinations(chosen, 2):
            assert hamming_distance(a, b) >= rep.packing_radius


def test_farthest_first_centers_are_separated(rng):
    pts = list(dict.fromkeys(random_points(rng, 300, 12)))
    rep = greedy_cover(pts, 3)
    for a, b in itertools.combinations(rep.centers, 2):
        assert hamming_distance(a, b) > 3


def test_entropy_cover_sandwich(rng):
    # N_ent(2r+1) <= N_cov(r) <= N_ent(r+1), with centers restricted to the set
    for _ in range(150):
        d = int(rng.integers(1, 7))
        pts = list(dict.fromkeys(random_points(rng, int(rng.integers(1, 11)), d)))
        r = int(rng.integers(0, d + 1))
        cov = min_cover(pts, r)
        assert max_packing(pts, 2 * r + 1) <= cov <= max_packing(pts, r + 1)
        assert greedy_packing(pts, r + 1) <= max_packing(pts, r + 1)


def test_cover_can_be_smaller_than_packing_at_same_radius():
    # the inequality "cover >= packing at the same radius" fails here
    pts = [P("000"), P("011")]
    assert min_cover(pts, 2) == 1
    assert max_packing(pts, 2) == 2


def test_clustered_output_certified_at_double_radius():
    spec = GenSpec(d=16, n=20, eta=2, zeta=1, seed=4)
    S, T = gen_clustered(spec)
    pts = list(S.points) + list(T.points)
    # the generator's own centers certify (eta, zeta)
    assert is_cover(pts, clustered_centers(spec), spec.zeta)
    # data-point centers need twice the radius
    assert greedy_cover(pts, 2 * spec.zeta).eta <= spec.eta


def test_greedy_packing_is_maximal(rng):
    pts = list(dict.fromkeys(random_points(rng, 40, 8)))
    chosen = set(greedy_packing_indices(pts, 3))
    for i, p in enumerate(pts):
        if i not in chosen:
            assert min(hamming_distance(p, pts[j]) for j in chosen) < 3


def test_rejects_bad_radius():
    with pytest.raises(ValueError):
        greedy_cover([P("0")], -1)
    with pytest.raises(ValueError):
        greedy_packing([P("0")], 0)
