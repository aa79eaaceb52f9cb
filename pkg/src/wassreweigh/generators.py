"""Synthetic instances: clustered (eta, zeta)-bounded pairs and greedy-hostile line instances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wassreweigh.distribution import WeightedDistribution
from wassreweigh.hypercube import Point

MAX_CENTER_ATTEMPTS = 10_000


class InfeasibleSpecError(ValueError):
    """The requested instance cannot be generated."""


@dataclass(frozen=True)
class GenSpec:
    d: int
    n: int
    eta: int
    zeta: int
    seed: int = 0
    kind: str = "clustered"
    level: int = 1
    skew: float = 0.5
    distinct: bool = True


def ball_volume(d: int, r: int) -> int:
    return sum(math.comb(d, i) for i in range(min(r, d) + 1))


def cluster_weights(eta: int, skew: float) -> np.ndarray:
    """Cluster mixture weights; skew 0 is uniform, larger skew favors low-index clusters."""
    if not 0 <= skew < 1:
        raise ValueError(f"skew must lie in [0, 1), got {skew}")
    w = (1.0 - skew) ** np.arange(eta, dtype=np.float64)
    return w / w.sum()


def _random_point(rng: np.random.Generator, d: int) -> int:
    bits = rng.integers(0, 2, size=d)
    return int("".join(map(str, bits)), 2)


def cluster_centers(d: int, eta: int, zeta: int, rng: np.random.Generator) -> list[Point]:
    """Rejection-sample ``eta`` centers pairwise at least 4 * zeta apart."""
    centers: list[int] = []
    attempts = 0
    while len(centers) < eta:
        attempts += 1
        if attempts > MAX_CENTER_ATTEMPTS:
            raise InfeasibleSpecError(
                f"could not place {eta} centers {4 * zeta} apart in Q_{d} after {MAX_CENTER_ATTEMPTS} draws"
            )
        c = _random_point(rng, d)
        if all((c ^ o).bit_count() >= 4 * zeta for o in centers):
            centers.append(c)
    return [Point(c, d) for c in centers]


def _draw_side(
    rng: np.random.Generator,
    centers: list[Point],
    zeta: int,
    n: int,
    probs: np.ndarray,
    prefix: str,
    distinct: bool,
) -> WeightedDistribution:
    d = centers[0].d
    points: list[Point] = []
    seen: set[Point] = set()
    draws = 0
    while len(points) < n:
        draws += 1
        if draws > 50 * n + 1000:
            raise InfeasibleSpecError(f"could not draw {n} distinct points; clusters are too small")
        lab = int(rng.choice(len(centers), p=probs))
        k = int(rng.integers(0, zeta + 1))
        v = centers[lab].value
        for b in rng.choice(d, size=k, replace=False).tolist():
            v ^= 1 << b
        p = Point(v, d)
        if distinct:
            if p in seen:
                continue
            seen.add(p)
        points.append(p)
    ids = [f"{prefix}{i}" for i in range(n)]
    return WeightedDistribution.from_counts(points, [1.0] * n, ids)


def gen_clustered(spec: GenSpec) -> tuple[WeightedDistribution, WeightedDistribution]:
    """Source and target drawn around the same ``eta`` centers.

    Every point is its center with at most ``zeta`` bits flipped, so both
    sides are (eta, zeta)-bounded by construction.  With ``spec.distinct``
    each side holds n distinct points with uniform weights (repeat draws are
    rejected); otherwise n draws are taken and repeats merge into weights.
    The source uses uniform cluster weights; the target uses
    :func:`cluster_weights` with ``spec.skew``.
    """
    d, n, eta, zeta = spec.d, spec.n, spec.eta, spec.zeta
    if min(d, n, eta) < 1 or zeta < 0:
        raise InfeasibleSpecError("need d, n, eta >= 1 and zeta >= 0")
    if spec.distinct and eta * ball_volume(d, zeta) < n:
        raise InfeasibleSpecError(f"{eta} balls of radius {zeta} in Q_{d} hold fewer than {n} points")
    if not zeta < d / 4:
        raise InfeasibleSpecError(f"zeta={zeta} must be below d/4={d / 4}")
    rng = np.random.default_rng(spec.seed)
    centers = cluster_centers(d, eta, zeta, rng)
    S = _draw_side(rng, centers, zeta, n, np.full(eta, 1.0 / eta), "s", spec.distinct)
    T = _draw_side(rng, centers, zeta, n, cluster_weights(eta, spec.skew), "t", spec.distinct)
    return S, T


def clustered_centers(spec: GenSpec) -> list[Point]:
    """Centers used by :func:`gen_clustered` for the same spec."""
    return cluster_centers(spec.d, spec.eta, spec.zeta, np.random.default_rng(spec.seed))


def line_positions(k: int) -> tuple[list[int], list[int], int]:
    """Supply and demand positions of the level-k line instance, plus its span.

    Level 0 is one supply at 0 and one demand at 1.  Level k+1 puts two
    copies of level k side by side, separated by a gap one shorter than the
    copy's span.  Greedy then joins the inner ends across the gap before
    either copy closes its own outer edge, and must finish with an edge
    spanning the whole line.
    """
    if k < 0:
        raise ValueError("level must be >= 0")
    sup, dem, span = [0], [1], 1
    for _ in range(k):
        gap = span - 1
        shift = span + gap
        sup = sup + [x + shift for x in sup]
        dem = dem + [x + shift for x in dem]
        span = 2 * span + gap
    return sup, dem, span


def unary_embed(position: int, d: int) -> Point:
    """Position a on the line -> the first a coordinates set; |a - b| equals Hamming distance."""
    if not 0 <= position <= d:
        raise ValueError(f"position {position} does not fit in dimension {d}")
    return Point(((1 << position) - 1) << (d - position), d)


def adversarial_dimension(k: int) -> int:
    return line_positions(k)[2]


def gen_adversarial(k: int, d: int | None = None) -> tuple[WeightedDistribution, WeightedDistribution]:
    """Uniform source (supply) and target (demand) on the level-k line instance in Q_d."""
    if k < 1:
        raise InfeasibleSpecError("adversarial level must be >= 1")
    sup, dem, span = line_positions(k)
    d = span if d is None else d
    if d < span:
        raise InfeasibleSpecError(f"level {k} needs d >= {span}, got {d}")
    S = WeightedDistribution.uniform([unary_embed(x, d) for x in sup], [f"s{i}" for i in range(len(sup))])
    T = WeightedDistribution.uniform([unary_embed(x, d) for x in dem], [f"t{i}" for i in range(len(dem))])
    return S, T
