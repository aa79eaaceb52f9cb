"""Exact minimum-weight matching and exact 1-Wasserstein distance.

These are the ground truth every greedy estimate is compared against.  Unit
multisets go through an assignment solver.  Real-valued marginals go through
a successive-shortest-path min-cost flow on the complete bipartite graph
(small instances) or a network simplex (large instances); both see the same
integer Hamming costs, so both optima are exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from wassreweigh.distribution import WeightedDistribution, check_same_dimension
from wassreweigh.greedy_match import Matching, bipartite_distances
from wassreweigh.hypercube import Point, common_dimension

DEFAULT_MATCHING_CAP = 2000
DEFAULT_SUPPORT_CAP = 20000
# dyadic denominator: exact for float weights to ~1e-16, and totals stay inside int64
QUANTUM_BITS = 52
SSP_MAX_EDGES = 4096


class SizeCapExceeded(ValueError):
    """Instance is larger than the exact solver is configured to accept."""


@dataclass(frozen=True)
class ExactResult:
    """Optimal cost together with the plan that attains it.

    ``flows`` holds (supply index, demand index, mass, distance); mass is an
    integer unit count for matchings and a probability mass for ``exact_w1``.
    """

    cost: float
    flows: tuple[tuple[int, int, float, int], ...]
    matching: Matching | None = None


def exact_min_matching(
    R: Sequence[Point], B: Sequence[Point], cap: int = DEFAULT_MATCHING_CAP, distances: np.ndarray | None = None
) -> ExactResult:
    """Minimum-weight perfect matching between equal-size unit multisets."""
    if len(R) != len(B):
        raise ValueError(f"perfect matching needs |R| == |B|, got {len(R)} and {len(B)}")
    if len(R) > cap:
        raise SizeCapExceeded(f"{len(R)} units exceeds the exact matching cap of {cap}")
    if not R:
        return ExactResult(0.0, (), Matching((), 0, 0, 0))
    D = bipartite_distances(R, B) if distances is None else np.asarray(distances)
    rows, cols = linear_sum_assignment(D)
    pairs = tuple((int(i), int(j), int(D[i, j])) for i, j in zip(rows, cols))
    total = sum(p[2] for p in pairs)
    return ExactResult(
        float(total),
        tuple((i, j, 1, w) for i, j, w in pairs),
        Matching(pairs, total, len(R), len(B)),
    )


def exact_transport(
    D: np.ndarray, a: Sequence[float], b: Sequence[float], method: str = "auto", reduce_common: bool = True
) -> ExactResult:
    """Optimal transport cost for costs ``D`` and marginals ``a``, ``b``.

    ``reduce_common`` may only be used when row i and column j describe the
    same point exactly when ``D[i, j] == 0``; under a metric the mass shared
    by such a pair can stay put in some optimal plan.
    """
    a = np.asarray(a, dtype=np.float64).copy()
    b = np.asarray(b, dtype=np.float64).copy()
    if method not in ("auto", "ssp", "network_simplex"):
        raise ValueError(f"unknown exact method {method!r}")
    fixed: list[tuple[int, int, float, int]] = []
    if reduce_common:
        zi, zj = np.nonzero(D == 0)
        for i, j in zip(zi.tolist(), zj.tolist()):
            s = min(a[i], b[j])
            if s > 0:
                a[i] -= s
                b[j] -= s
                fixed.append((i, j, float(s), 0))
    rows = np.nonzero(a > 1e-15)[0]
    cols = np.nonzero(b > 1e-15)[0]
    if rows.size == 0 or cols.size == 0:
        return ExactResult(0.0, tuple(fixed))
    sub = D[np.ix_(rows, cols)]
    if method == "auto":
        method = "ssp" if rows.size * cols.size <= SSP_MAX_EDGES else "network_simplex"
    if method == "ssp":
        flows = _ssp(sub, a[rows], b[cols])
    else:
        flows = _network_simplex(sub, a[rows], b[cols])
    moved = [(int(rows[i]), int(cols[j]), f, int(sub[i, j])) for i, j, f in flows]
    cost = float(sum(f * w for _, _, f, w in moved))
    return ExactResult(cost, tuple(fixed) + tuple(moved))


def exact_w1(
    P: WeightedDistribution,
    Q: WeightedDistribution,
    cap: int = DEFAULT_SUPPORT_CAP,
    method: str = "auto",
) -> float:
    """Exact 1-Wasserstein distance under the Hamming metric."""
    return exact_w1_result(P, Q, cap=cap, method=method).cost


def exact_w1_result(
    P: WeightedDistribution,
    Q: WeightedDistribution,
    cap: int = DEFAULT_SUPPORT_CAP,
    method: str = "auto",
) -> ExactResult:
    check_same_dimension(P, Q)
    if max(len(P), len(Q)) > cap:
        raise SizeCapExceeded(f"support sizes {len(P)}, {len(Q)} exceed the exact cap of {cap}")
    D = bipartite_distances(P.packed, Q.packed)
    return exact_transport(D, P.weights, Q.weights, method=method)


def exact_w1_points(
    R: Sequence[Point], B: Sequence[Point], method: str = "auto"
) -> float:
    """Exact W1 between uniform measures on two unit multisets."""
    common_dimension(list(R) + list(B))
    D = bipartite_distances(R, B)
    a = np.full(len(R), 1.0 / len(R))
    b = np.full(len(B), 1.0 / len(B))
    # repeated points make D == 0 without identity of rows, so skip the shortcut
    return exact_transport(D, a, b, method=method, reduce_common=False).cost


def _quantize(w: np.ndarray) -> list[int]:
    return [int(round(x * (1 << QUANTUM_BITS))) for x in w.tolist()]


def _ssp(D: np.ndarray, a: np.ndarray, b: np.ndarray) -> list[tuple[int, int, float]]:
    """Successive shortest augmenting paths with node potentials.

    Dense Dijkstra over sources (0..n-1) and sinks (n..n+m-1); the super
    source and sink are implicit.  Masses are integers in units of
    2**-QUANTUM_BITS, so every augmentation is exact.
    """
    n, m = D.shape
    cost = D.astype(np.int64)
    rem_a = _quantize(a)
    rem_b = _quantize(b)
    total = min(sum(rem_a), sum(rem_b))
    x = np.zeros((n, m), dtype=np.int64)
    pi_s = np.zeros(n, dtype=np.int64)  # source potentials
    pi_t = np.zeros(m, dtype=np.int64)  # sink potentials
    pi_sink = 0  # potential of the super sink
    INF = np.iinfo(np.int64).max // 4
    moved = 0
    while moved < total:
        ra = np.array([r > 0 for r in rem_a])
        rb = np.array([r > 0 for r in rem_b])
        dist_s = np.where(ra, -pi_s, INF)  # arc super source -> i has cost 0, super source potential 0
        dist_t = np.full(m, INF, dtype=np.int64)
        par_s = np.full(n, -1, dtype=np.int64)  # sink feeding a source via a backward arc
        par_t = np.full(m, -1, dtype=np.int64)  # source feeding a sink
        done_s = np.zeros(n, dtype=bool)
        done_t = np.zeros(m, dtype=bool)
        best_end, best_val = -1, INF
        while True:
            ds = np.where(done_s, INF, dist_s)
            dt = np.where(done_t, INF, dist_t)
            i = int(np.argmin(ds))
            j = int(np.argmin(dt))
            if ds[i] >= INF and dt[j] >= INF:
                break
            if ds[i] <= dt[j]:
                if ds[i] >= best_val:
                    break
                done_s[i] = True
                cand = ds[i] + cost[i] + pi_s[i] - pi_t
                better = (cand < dist_t) & ~done_t
                dist_t[better] = cand[better]
                par_t[better] = i
            else:
                if dt[j] >= best_val:
                    break
                done_t[j] = True
                if rb[j]:
                    v = dt[j] + pi_t[j] - pi_sink
                    if v < best_val:
                        best_val, best_end = v, j
                back = x[:, j] > 0
                cand = dt[j] - cost[:, j] + pi_t[j] - pi_s
                better = back & (cand < dist_s) & ~done_s
                dist_s[better] = cand[better]
                par_s[better] = j
        if best_end < 0:
            break
        # potentials: shortest distance, capped at the distance of the super sink
        cap_s = np.minimum(dist_s, best_val)
        cap_t = np.minimum(dist_t, best_val)
        pi_s += cap_s
        pi_t += cap_t
        pi_sink += best_val
        # walk back from the sink, collecting the path and its bottleneck
        path: list[tuple[int, int, int]] = []  # (source, sink, +1 forward / -1 backward)
        j = best_end
        bottleneck = rem_b[j]
        while True:
            i = int(par_t[j])
            path.append((i, j, 1))
            pj = int(par_s[i])
            if pj < 0:
                bottleneck = min(bottleneck, rem_a[i])
                break
            path.append((i, pj, -1))
            bottleneck = min(bottleneck, int(x[i, pj]))
            j = pj
        bottleneck = min(bottleneck, total - moved)
        for i, j, sign in path:
            x[i, j] += sign * bottleneck
        rem_a[path[-1][0]] -= bottleneck
        rem_b[best_end] -= bottleneck
        moved += bottleneck
    scale = float(1 << QUANTUM_BITS)
    ii, jj = np.nonzero(x)
    return [(int(i), int(j), int(x[i, j]) / scale) for i, j in zip(ii, jj)]


def _network_simplex(D: np.ndarray, a: np.ndarray, b: np.ndarray) -> list[tuple[int, int, float]]:
    for key in ("PYTORCH", "TENSORFLOW", "JAX", "CUPY"):
        os.environ.setdefault(f"POT_BACKEND_DISABLE_{key}", "1")
    import ot

    # residual totals agree up to float error; solve on normalized marginals and rescale
    total = min(float(a.sum()), float(b.sum()))
    G, log = ot.emd(a / a.sum(), b / b.sum(), D.astype(np.float64), numItermax=50_000_000, log=True)
    if log.get("warning"):
        raise RuntimeError(f"network simplex did not converge: {log['warning']}")
    ii, jj = np.nonzero(G > 0)
    return [(int(i), int(j), float(G[i, j]) * total) for i, j in zip(ii, jj)]
