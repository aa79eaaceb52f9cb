"""Alternating cycles between greedy and optimal matchings, and the bounds built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


from wassreweigh.covering import greedy_packing
from wassreweigh.exact_oracle import exact_min_matching
from wassreweigh.greedy_match import Matching, bipartite_distances, greedy_match, matching_violations
from wassreweigh.hypercube import Point

LOG2_3_2 = math.log2(1.5)


class NotPerfectError(ValueError):
    """Cycle decomposition needs two perfect matchings on the same units."""


@dataclass(frozen=True)
class AlternatingCycle:
    """One cycle of the symmetric difference of a greedy and an optimal matching.

    ``supply`` and ``demand`` list units in walk order: supply[k] is greedily
    matched to demand[k] and optimally matched to demand[k - 1].
    """

    supply: tuple[int, ...]
    demand: tuple[int, ...]
    greedy_weight: int
    optimal_weight: int

    def __len__(self) -> int:
        return 2 * len(self.supply)

    @property
    def alpha(self) -> float:
        if self.optimal_weight == 0:
            return math.inf if self.greedy_weight > 0 else 1.0
        return self.greedy_weight / self.optimal_weight

    def edges(self) -> list[tuple[str, int, int]]:
        """Edges in walk order, alternating ("greedy", s, t) and ("optimal", s, t)."""
        out = []
        k = len(self.supply)
        for i in range(k):
            out.append(("greedy", self.supply[i], self.demand[i]))
            out.append(("optimal", self.supply[(i + 1) % k], self.demand[i]))
        return out


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple[AlternatingCycle, ...]
    shared_edges: int

    @property
    def alphas(self) -> list[float]:
        return [c.alpha for c in self.cycles]

    def max_length(self) -> int:
        return max((len(c) for c in self.cycles), default=0)


def alternating_cycles(greedy: Matching, optimal: Matching) -> CycleDecomposition:
    """Split the symmetric difference of two perfect matchings into alternating cycles.

    Edges present in both matchings are dropped.  Cycles start at their
    lowest supply unit, and are listed in order of that unit.
    """
    for name, mt in (("greedy", greedy), ("optimal", optimal)):
        if not mt.is_perfect():
            raise NotPerfectError(f"{name} matching is not perfect")
    if (greedy.n_supply, greedy.n_demand) != (optimal.n_supply, optimal.n_demand):
        raise NotPerfectError("matchings are on different unit sets")
    g_of = {s: (t, w) for s, t, w in greedy.pairs}
    o_by_demand = {t: (s, w) for s, t, w in optimal.pairs}
    o_of = {s: t for s, t, _ in optimal.pairs}

    seen: set[int] = set()
    cycles: list[AlternatingCycle] = []
    shared = 0
    for start in range(greedy.n_supply):
        if start in seen:
            continue
        if g_of[start][0] == o_of[start]:
            seen.add(start)
            shared += 1
            continue
        sup: list[int] = []
        dem: list[int] = []
        gw = ow = 0
        s = start
        while True:
            seen.add(s)
            t, w = g_of[s]
            sup.append(s)
            dem.append(t)
            gw += w
            s, w = o_by_demand[t]
            ow += w
            if s == start:
                break
        cycles.append(AlternatingCycle(tuple(sup), tuple(dem), gw, ow))
    return CycleDecomposition(tuple(cycles), shared)


@dataclass(frozen=True)
class LemmaReport:
    alpha: float
    packing: int
    packing_radius: int
    lhs: float
    rhs: float
    holds: bool
    skipped: bool = False
    reason: str = ""


def check_structural_lemma(
    cycle: AlternatingCycle, R: Sequence[Point], B: Sequence[Point], d: int
) -> LemmaReport:
    """Check ``alpha <= (N_ent(alpha/2) * (2d - alpha) / alpha) ** log2(3/2)`` on one cycle.

    The packing count is taken greedily over the cycle's vertices, which only
    lower-bounds the true metric entropy, so the check is conservative.
    """
    if cycle.optimal_weight == 0:
        return LemmaReport(cycle.alpha, 0, 0, cycle.alpha, math.nan, True, True, "zero optimal weight")
    alpha = cycle.alpha
    radius = max(1, math.ceil(alpha / 2))
    vertices = [R[s] for s in cycle.supply] + [B[t] for t in cycle.demand]
    packing = greedy_packing(vertices, radius)
    if 2 * d - alpha <= 0:
        return LemmaReport(alpha, packing, radius, alpha, math.nan, False, False, "alpha >= 2d")
    rhs = (packing * (2 * d - alpha) / alpha) ** LOG2_3_2
    return LemmaReport(alpha, packing, radius, alpha, rhs, alpha <= rhs + 1e-12)


def bound_exponent(xi: float) -> float:
    """Exponent of d in the covering-based approximation factor."""
    if xi <= 1:
        raise ValueError(f"xi must exceed 1, got {xi}")
    if math.isinf(xi):
        return LOG2_3_2 / (1 + LOG2_3_2)
    return (1 + xi * LOG2_3_2) / (xi * (1 + LOG2_3_2))


def approx_bound(eta: int, zeta: int, d: int, xi: float, K: float = 1.0) -> float:
    """``max(2 * zeta, K * d ** exponent(xi))``.

    ``eta`` enters only through the premise tying it to xi (see
    :func:`infer_xi`); K stands in for the unspecified constant of the O(.).
    """
    if xi <= 1:
        raise ValueError(f"xi must exceed 1, got {xi}")
    if eta < 1 or zeta < 0 or d < 1:
        raise ValueError("need eta >= 1, zeta >= 0, d >= 1")
    return max(2.0 * zeta, K * d ** bound_exponent(xi))


def infer_xi(eta: int, d: int) -> float:
    """Largest xi with ``eta <= d ** (1 / (xi * log2(3/2)))``, floored at 1 + 1e-6."""
    if eta <= 1:
        return math.inf
    if d <= 1:
        return 1 + 1e-6
    xi = math.log(d) / (LOG2_3_2 * math.log(eta))
    return max(xi, 1 + 1e-6)


def ratio_ceiling(decomposition: CycleDecomposition) -> float:
    """Longest alternating cycle length raised to log2(3/2); 1.0 when there are no cycles."""
    longest = decomposition.max_length()
    if longest == 0:
        return 1.0
    return longest ** LOG2_3_2


@dataclass
class InstanceAnalysis:
    greedy_cost: int
    exact_cost: int
    ratio: float
    ceiling: float
    bound: float | None
    cycles: list[dict] = field(default_factory=list)
    greedy_violations: int = 0

    def as_dict(self) -> dict:
        return {
            "greedy_cost": self.greedy_cost,
            "exact_cost": self.exact_cost,
            "ratio": self.ratio,
            "cycles": self.cycles,
            "bound": self.bound,
            "ceiling": self.ceiling,
            "greedy_violations": self.greedy_violations,
        }


def measured_ratio(greedy_cost: float, exact_cost: float) -> float:
    if exact_cost == 0:
        return 1.0 if greedy_cost == 0 else math.inf
    return greedy_cost / exact_cost


def analyze_units(
    R: Sequence[Point],
    B: Sequence[Point],
    eta: int | None = None,
    zeta: int | None = None,
    K: float = 1.0,
) -> InstanceAnalysis:
    """Greedy vs exact on equal-size unit multisets, with per-cycle lemma checks."""
    if len(R) != len(B):
        raise ValueError("analysis needs |R| == |B|")
    d = R[0].d
    D = bipartite_distances(R, B)
    g = greedy_match(R, B, distances=D)
    opt = exact_min_matching(R, B, distances=D)
    decomp = alternating_cycles(g, opt.matching)
    cycles = []
    for c in decomp.cycles:
        rep = check_structural_lemma(c, R, B, d)
        cycles.append(
            {
                "len": len(c),
                "alpha": c.alpha,
                "lemma_holds": rep.holds,
                "lemma_rhs": rep.rhs,
                "packing": rep.packing,
            }
        )
    bound = None
    if eta is not None and zeta is not None:
        bound = approx_bound(eta, zeta, d, infer_xi(eta, d), K)
    return InstanceAnalysis(
        greedy_cost=g.total_weight,
        exact_cost=opt.matching.total_weight,
        ratio=measured_ratio(g.total_weight, opt.matching.total_weight),
        ceiling=ratio_ceiling(decomp),
        bound=bound,
        cycles=cycles,
        greedy_violations=len(matching_violations(g, D)),
    )
