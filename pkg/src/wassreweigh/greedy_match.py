"""Greedy minimum-weight bipartite matching on hypercube point multisets.

Two routes are provided:

* :func:`greedy_match` works on explicit units (a multiset is a list with
  repeats) by sorting every edge once.
* :func:`capacity_greedy` works on points with integer multiplicities and
  never materializes copies; it walks distance levels and fills capacities.

With the ``"global"`` variant both repeatedly take the shortest available
edge, ties broken by (distance, supply index, demand index).  The
``"nearest"`` variant is the sequential reading of the per-point BFS: supply
units in index order each grab their nearest free demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from wassreweigh._parallel import ordered_map
from wassreweigh.hypercube import Point, common_dimension, distance_matrix, pack

VARIANTS = ("global", "nearest")
TIE_BREAKS = ("lex",)


@dataclass(frozen=True)
class Matching:
    """Unit-level matching: ``pairs`` holds (supply unit, demand unit, distance)."""

    pairs: tuple[tuple[int, int, int], ...]
    total_weight: int
    n_supply: int
    n_demand: int

    def supply_to_demand(self) -> dict[int, int]:
        return {s: t for s, t, _ in self.pairs}

    def is_perfect(self) -> bool:
        return self.n_supply == self.n_demand == len(self.pairs)


@dataclass(frozen=True)
class TransportPlan:
    """Integer flows between supply and demand points.

    ``flows`` holds (supply index, demand index, mass, distance) in the order
    the greedy created them.
    """

    flows: tuple[tuple[int, int, int, int], ...]
    moved_mass: int
    cost: int
    total_supply: int
    total_demand: int

    def aggregated(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for i, j, f, _ in self.flows:
            out[(i, j)] = out.get((i, j), 0) + f
        return out

    def shipped(self, n_supply: int) -> np.ndarray:
        out = np.zeros(n_supply, dtype=np.int64)
        for i, _, f, _ in self.flows:
            out[i] += f
        return out

    def received(self, n_demand: int) -> np.ndarray:
        out = np.zeros(n_demand, dtype=np.int64)
        for _, j, f, _ in self.flows:
            out[j] += f
        return out


def _check_rule(variant: str, tie_break: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown greedy variant {variant!r}; expected one of {VARIANTS}")
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"unknown tie-break rule {tie_break!r}; expected one of {TIE_BREAKS}")


def bipartite_distances(supply: Sequence[Point] | np.ndarray, demand: Sequence[Point] | np.ndarray) -> np.ndarray:
    """Distance matrix between two point lists (or pre-packed word arrays)."""
    if len(supply) == 0 or len(demand) == 0:
        return np.zeros((len(supply), len(demand)), dtype=np.int32)
    if not isinstance(supply, np.ndarray) and not isinstance(demand, np.ndarray):
        common_dimension(list(supply) + list(demand))
    if not isinstance(supply, np.ndarray):
        supply = pack(supply)
    if not isinstance(demand, np.ndarray):
        demand = pack(demand)
    rows = list(range(0, supply.shape[0], 512))
    blocks = ordered_map(lambda lo: distance_matrix(supply[lo : lo + 512], demand), rows)
    return np.vstack(blocks) if blocks else np.zeros((0, demand.shape[0]), dtype=np.int32)


def greedy_match(
    R: Sequence[Point],
    B: Sequence[Point],
    tie_break: str = "lex",
    variant: str = "global",
    distances: np.ndarray | None = None,
) -> Matching:
    """Greedy matching between unit multisets ``R`` (supply) and ``B`` (demand).

    Matches ``min(|R|, |B|)`` units.  An empty side gives an empty matching.
    """
    _check_rule(variant, tie_break)
    n, m = len(R), len(B)
    if n == 0 or m == 0:
        return Matching((), 0, n, m)
    D = bipartite_distances(R, B) if distances is None else np.asarray(distances)
    target = min(n, m)
    pairs: list[tuple[int, int, int]] = []

    if variant == "global":
        # (distance, supply, demand) lexicographic order == stable sort of the row-major ravel
        order = np.argsort(D.ravel(), kind="stable")
        used_r = bytearray(n)
        used_b = bytearray(m)
        flat = D.ravel()
        for k in order.tolist():
            i, j = divmod(k, m)
            if used_r[i] or used_b[j]:
                continue
            used_r[i] = used_b[j] = 1
            pairs.append((i, j, int(flat[k])))
            if len(pairs) == target:
                break
    else:
        free = np.ones(m, dtype=bool)
        big = np.iinfo(np.int64).max
        for i in range(n):
            if len(pairs) == target:
                break
            row = np.where(free, D[i].astype(np.int64), big)
            j = int(np.argmin(row))
            free[j] = False
            pairs.append((i, j, int(D[i, j])))

    return Matching(tuple(pairs), sum(p[2] for p in pairs), n, m)


def capacity_greedy(
    supply_points: Sequence[Point] | np.ndarray,
    supply_counts: Sequence[int],
    demand_points: Sequence[Point] | np.ndarray,
    demand_counts: Sequence[int],
    tie_break: str = "lex",
    variant: str = "global",
    distances: np.ndarray | None = None,
) -> TransportPlan:
    """Greedy transport between points carrying integer multiplicities.

    Produces the same aggregated flows as :func:`greedy_match` run on the
    duplicated multisets with units ordered by (point index, copy index).
    Moves ``min(total supply, total demand)`` units.
    """
    _check_rule(variant, tie_break)
    rs = [int(c) for c in supply_counts]
    rd = [int(c) for c in demand_counts]
    if any(c < 0 for c in rs) or any(c < 0 for c in rd):
        raise ValueError("multiplicities must be nonnegative")
    total_s, total_d = sum(rs), sum(rd)
    if total_s < 1:
        raise ValueError("total supply must be at least 1")
    D = bipartite_distances(supply_points, demand_points) if distances is None else np.asarray(distances)
    if D.shape != (len(rs), len(rd)):
        raise ValueError(f"distance matrix shape {D.shape} does not match ({len(rs)}, {len(rd)})")

    if variant == "global":
        flows = _global_levels(D, rs, rd, min(total_s, total_d))
    else:
        flows = _nearest_first(D, rs, rd, min(total_s, total_d))
    moved = sum(f[2] for f in flows)
    cost = sum(f[2] * f[3] for f in flows)
    return TransportPlan(tuple(flows), moved, cost, total_s, total_d)


def _global_levels(D: np.ndarray, rs: list[int], rd: list[int], target: int) -> list[tuple[int, int, int, int]]:
    flows: list[tuple[int, int, int, int]] = []
    if target == 0:
        return flows
    rows = np.array([i for i, c in enumerate(rs) if c > 0], dtype=np.int64)
    cols = np.array([j for j, c in enumerate(rd) if c > 0], dtype=np.int64)
    present = np.nonzero(np.bincount(D[np.ix_(rows, cols)].ravel()))[0]
    moved = 0
    for t in present.tolist():
        sub = D[np.ix_(rows, cols)]
        ii, jj = np.nonzero(sub == t)
        if ii.size == 0:
            continue
        for i, j in zip(rows[ii].tolist(), cols[jj].tolist()):
            a = rs[i]
            if a == 0:
                continue
            b = rd[j]
            if b == 0:
                continue
            f = a if a < b else b
            rs[i] = a - f
            rd[j] = b - f
            flows.append((i, j, f, t))
            moved += f
        if moved == target:
            break
        rows = rows[[rs[i] > 0 for i in rows.tolist()]]
        cols = cols[[rd[j] > 0 for j in cols.tolist()]]
    return flows


def _nearest_first(D: np.ndarray, rs: list[int], rd: list[int], target: int) -> list[tuple[int, int, int, int]]:
    flows: list[tuple[int, int, int, int]] = []
    free = np.array([c > 0 for c in rd], dtype=bool)
    big = np.iinfo(np.int64).max
    moved = 0
    for i in range(len(rs)):
        while rs[i] > 0 and moved < target:
            row = np.where(free, D[i].astype(np.int64), big)
            j = int(np.argmin(row))
            f = min(rs[i], rd[j])
            rs[i] -= f
            rd[j] -= f
            if rd[j] == 0:
                free[j] = False
            flows.append((i, j, f, int(D[i, j])))
            moved += f
    return flows


def expand_units(points: Sequence[Point], counts: Sequence[int]) -> tuple[list[Point], list[int]]:
    """Explicit multiset: each point repeated by its count, plus the owner index of every unit."""
    units: list[Point] = []
    owner: list[int] = []
    for k, (p, c) in enumerate(zip(points, counts)):
        units.extend([p] * int(c))
        owner.extend([k] * int(c))
    return units, owner


def aggregate_matching(matching: Matching, supply_owner: Sequence[int], demand_owner: Sequence[int]) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for s, t, _ in matching.pairs:
        key = (supply_owner[s], demand_owner[t])
        out[key] = out.get(key, 0) + 1
    return out


def greedy_edge_violations(
    supply_idx: Sequence[int], demand_idx: Sequence[int], D: np.ndarray
) -> list[tuple[int, int]]:
    """Pairs of matched edges (k, l) breaking the greedy exchange property.

    For matched edges (x, x') and (y, y') the property requires
    ``min(d(x', y), d(y', x)) >= min(d(x, x'), d(y, y'))``.  ``supply_idx`` and
    ``demand_idx`` index the rows/columns of ``D``; works for unit matchings
    and for aggregated flows alike.
    """
    s = np.asarray(supply_idx, dtype=np.int64)
    t = np.asarray(demand_idx, dtype=np.int64)
    if s.size < 2:
        return []
    w = D[s, t].astype(np.int64)
    cross = D[np.ix_(s, t)].astype(np.int64)  # cross[k, l] = d(x_k, y'_l)
    lhs = np.minimum(cross, cross.T)
    rhs = np.minimum(w[:, None], w[None, :])
    bad = lhs < rhs
    np.fill_diagonal(bad, False)
    ks, ls = np.nonzero(np.triu(bad))
    return list(zip(ks.tolist(), ls.tolist()))


def matching_violations(matching: Matching, D: np.ndarray) -> list[tuple[int, int]]:
    return greedy_edge_violations([p[0] for p in matching.pairs], [p[1] for p in matching.pairs], D)


def plan_violations(plan: TransportPlan, D: np.ndarray) -> list[tuple[int, int]]:
    return greedy_edge_violations([f[0] for f in plan.flows], [f[1] for f in plan.flows], D)
