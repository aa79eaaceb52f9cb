"""Weighted discrete distributions over hypercube points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from wassreweigh._parallel import ordered_map
from wassreweigh.hypercube import DimensionMismatchError, Point, distance_matrix, pack

WEIGHT_TOL = 1e-9


class DistributionError(ValueError):
    """Invalid weights or support for a WeightedDistribution."""


class ZeroMassError(DistributionError):
    """Normalization was asked for a vector with no positive entry."""


def normalize(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise DistributionError("weights must be one-dimensional")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DistributionError("weights must be finite and nonnegative")
    total = math.fsum(w)
    if total <= 0:
        raise ZeroMassError("cannot normalize: no strictly positive weight")
    return w / total


@dataclass(frozen=True, eq=False)
class WeightedDistribution:
    """Probability weights on distinct points of one hypercube Q_d.

    ``ids`` are record identifiers carried through to output files; their
    order is the order used for every deterministic tie-break.
    """

    points: tuple[Point, ...]
    ids: tuple[str, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        points = tuple(self.points)
        ids = tuple(str(i) for i in self.ids)
        w = np.array(self.weights, dtype=np.float64)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "ids", ids)
        if not points:
            raise DistributionError("distribution needs at least one point")
        if len(ids) != len(points) or w.shape != (len(points),):
            raise DistributionError("points, ids and weights must have equal length")
        dims = {p.d for p in points}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
        if len(set(points)) != len(points):
            raise DistributionError("support points must be distinct")
        if len(set(ids)) != len(ids):
            raise DistributionError("record ids must be unique")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise DistributionError("weights must be finite and nonnegative")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise DistributionError(f"weights sum to {math.fsum(w)!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, points: Sequence[Point], ids: Sequence[str] | None = None) -> "WeightedDistribution":
        ids = [str(i) for i in range(len(points))] if ids is None else ids
        return cls(tuple(points), tuple(ids), np.full(len(points), 1.0 / len(points)))

    @classmethod
    def from_counts(
        cls, points: Sequence[Point], counts: Sequence[float], ids: Sequence[str] | None = None
    ) -> "WeightedDistribution":
        """Merge repeated points, summing their counts, then normalize.

        The first occurrence of a point fixes its position and its id.
        """
        ids = [str(i) for i in range(len(points))] if ids is None else list(ids)
        slot: dict[Point, int] = {}
        merged_pts: list[Point] = []
        merged_ids: list[str] = []
        merged_w: list[float] = []
        for p, c, i in zip(points, counts, ids):
            k = slot.get(p)
            if k is None:
                slot[p] = len(merged_pts)
                merged_pts.append(p)
                merged_ids.append(i)
                merged_w.append(float(c))
            else:
                merged_w[k] += float(c)
        return cls(tuple(merged_pts), tuple(merged_ids), normalize(merged_w))

    @property
    def d(self) -> int:
        return self.points[0].d

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def packed(self) -> np.ndarray:
        return pack(self.points, self.d)

    def min_positive_weight(self) -> float:
        pos = self.weights[self.weights > 0]
        return float(pos.min())

    def restrict_positive(self) -> "WeightedDistribution":
        keep = np.nonzero(self.weights > 0)[0]
        if len(keep) == len(self):
            return self
        return WeightedDistribution(
            tuple(self.points[i] for i in keep),
            tuple(self.ids[i] for i in keep),
            normalize(self.weights[keep]),
        )

    def weight_of(self, p: Point) -> float:
        try:
            return float(self.weights[self.points.index(p)])
        except ValueError:
            return 0.0


def check_same_dimension(p: WeightedDistribution, q: WeightedDistribution) -> int:
    if p.d != q.d:
        raise DimensionMismatchError(f"dimension mismatch: {p.d} != {q.d}")
    return p.d


def scale_to_multiplicities(dist: WeightedDistribution | Sequence[float], C: int) -> np.ndarray:
    """Integer multiplicities ``round(C * w)`` (half to even)."""
    if int(C) != C or C < 1:
        raise ValueError(f"scale factor C must be a positive integer, got {C!r}")
    w = dist.weights if isinstance(dist, WeightedDistribution) else np.asarray(dist, dtype=np.float64)
    return np.rint(C * w).astype(np.int64)


def rounding_error_bound(dist: WeightedDistribution | Sequence[float], C: int) -> float:
    """``1 / (C * min positive weight)``, the error attached to scaling by C."""
    w = dist.weights if isinstance(dist, WeightedDistribution) else np.asarray(dist, dtype=np.float64)
    pos = w[w > 0]
    if pos.size == 0:
        raise ZeroMassError("no positive weight")
    return 1.0 / (C * float(pos.min()))


@dataclass(frozen=True)
class SpreadReport:
    spread: float
    argmin_center: Point
    center_index: int


def spread(dist: WeightedDistribution, chunk: int = 256) -> SpreadReport:
    """Minimize ``sqrt(1 + ln E_mu exp(d(x0, x)^2))`` over centers x0 in the support.

    The inner expectation is evaluated as a log-sum-exp: exp(d^2) overflows
    float64 once d reaches 27.
    """
    support = np.nonzero(dist.weights > 0)[0]
    words = dist.packed[support]
    log_w = np.log(dist.weights[support])
    starts = list(range(0, len(support), chunk))

    def block(lo: int) -> np.ndarray:
        dm = distance_matrix(words[lo : lo + chunk], words).astype(np.float64)
        return logsumexp(dm * dm + log_w[None, :], axis=1)

    log_mgf = np.concatenate(ordered_map(block, starts))
    # argmin returns the first minimizer, so ties resolve to the lowest index
    best = int(support[np.argmin(log_mgf)])
    value = math.sqrt(1.0 + max(float(log_mgf.min()), 0.0))
    return SpreadReport(value, dist.points[best], best)
