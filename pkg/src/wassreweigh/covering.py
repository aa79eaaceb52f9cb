"""Covering-number upper bounds and packing (metric entropy) lower bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from wassreweigh.hypercube import Point, common_dimension, distance_matrix, pack


@dataclass(frozen=True)
class CoveringReport:
    """Certificate that ``points`` lie in ``eta`` balls of radius ``zeta``.

    Centers are input points.  ``packing_count`` points are pairwise at least
    ``packing_radius = 2 * zeta + 1`` apart, and no ball of radius zeta holds
    two of them, so any cover at radius zeta needs at least that many balls.
    """

    eta: int
    zeta: int
    centers: tuple[Point, ...]
    center_indices: tuple[int, ...]
    packing_count: int
    packing_radius: int
    max_center_distance: int

    def as_dict(self) -> dict:
        return {
            "eta": self.eta,
            "zeta": self.zeta,
            "centers": [c.encode() for c in self.centers],
            "packing_count": self.packing_count,
            "packing_radius": self.packing_radius,
            "max_center_distance": self.max_center_distance,
            "centers_restricted_to_input": True,
        }


def _words(points: Sequence[Point]) -> np.ndarray:
    return pack(points, common_dimension(points))


def _distances(points: Sequence[Point]) -> np.ndarray:
    words = _words(points)
    return distance_matrix(words, words)


def _row(words: np.ndarray, i: int) -> np.ndarray:
    return distance_matrix(words[i : i + 1], words)[0]


def greedy_cover(points: Sequence[Point], zeta: int) -> CoveringReport:
    """Farthest-first traversal until every point is within ``zeta`` of a center.

    Starts at the lexicographically smallest point; the next center is the
    point farthest from the current centers (lowest index on ties).
    """
    if zeta < 0:
        raise ValueError(f"zeta must be >= 0, got {zeta}")
    if not points:
        raise ValueError("cannot cover an empty point set")
    words = _words(points)
    first = min(range(len(points)), key=lambda i: (points[i].value, i))
    centers = [first]
    nearest = _row(words, first)
    while True:
        far = int(np.argmax(nearest))
        if nearest[far] <= zeta:
            break
        centers.append(far)
        np.minimum(nearest, _row(words, far), out=nearest)
    radius = 2 * zeta + 1
    return CoveringReport(
        eta=len(centers),
        zeta=zeta,
        centers=tuple(points[i] for i in centers),
        center_indices=tuple(centers),
        packing_count=len(_packing_from_words(words, radius)),
        packing_radius=radius,
        max_center_distance=int(nearest.max()),
    )


def _packing_from_words(words: np.ndarray, r: int) -> list[int]:
    blocked = np.zeros(words.shape[0], dtype=bool)
    chosen: list[int] = []
    i = 0
    while i < words.shape[0]:
        chosen.append(i)
        blocked |= _row(words, i) < r
        free = np.nonzero(~blocked[i + 1 :])[0]
        if free.size == 0:
            break
        i += 1 + int(free[0])
    return chosen


def greedy_packing_indices(points: Sequence[Point], r: int) -> list[int]:
    """Indices of a maximal r-separated subset, built by one scan in input order."""
    if r < 1:
        raise ValueError(f"packing radius must be >= 1, got {r}")
    if not points:
        return []
    return _packing_from_words(_words(points), r)


def greedy_packing(points: Sequence[Point], r: int) -> int:
    """Size of a greedily built r-separated subset; a lower bound on N^ent_r."""
    return len(greedy_packing_indices(points, r))


def is_cover(points: Sequence[Point], centers: Sequence[Point], zeta: int) -> bool:
    d = common_dimension(list(points) + list(centers))
    D = distance_matrix(pack(points, d), pack(centers, d))
    return bool(np.all(D.min(axis=1) <= zeta))


def max_packing(points: Sequence[Point], r: int) -> int:
    """Exact N^ent_r by exhaustive search (small inputs only)."""
    n = len(points)
    if n > 16:
        raise ValueError("exhaustive packing is limited to 16 points")
    D = _distances(points)
    for k in range(n, 0, -1):
        for subset in itertools.combinations(range(n), k):
            if all(D[i, j] >= r for i, j in itertools.combinations(subset, 2)):
                return k
    return 0


def min_cover(points: Sequence[Point], zeta: int) -> int:
    """Exact minimum number of radius-zeta balls centered at input points (small inputs only)."""
    n = len(points)
    if n > 16:
        raise ValueError("exhaustive covering is limited to 16 points")
    D = _distances(points)
    within = D <= zeta
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(n), k):
            if np.all(within[list(subset)].any(axis=0)):
                return k
    return n
