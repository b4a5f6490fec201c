"""Separated sets, relative entropy estimates and independence sets.

For the canonical metric, ``d_H(x, y) <= eps`` holds exactly when x and y
agree on ``H + [-(k-1), k-1]`` with ``2^-k <= eps < 2^-(k-1)``, so the
conflict graph of a pool is built by grouping points on that window. The
maximum separated set is then a maximum independent set of the conflict
graph, found by branch and bound per connected component.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import EmptyFiber, InvalidArgument, ResourceLimit, StructureError
from .group import FiniteSubset, as_subset, folner_window
from .lifts import find_common_fiber, solve_lift
from .symbolic import (
    Cylinder,
    PeriodicPoint,
    SlidingBlockCode,
    apply_factor,
    fiber_points,
    metric_dH,
    separation_window,
)

EXACT_COMPONENT_LIMIT = 40
MAX_INDEPENDENCE_SIZE = 16


# -- maximum independent set ---------------------------------------------------


def _components(adj: dict[int, set[int]]) -> list[list[int]]:
    seen, comps = set(), []
    for v in sorted(adj):
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _clique_cover_bound(vertices: set[int], adj) -> int:
    """Number of cliques in a greedy clique cover: an upper bound on the MIS."""
    cliques: list[list[int]] = []
    for v in sorted(vertices):
        for c in cliques:
            if all(u in adj[v] for u in c):
                c.append(v)
                break
        else:
            cliques.append([v])
    return len(cliques)


def _mis_exact(vertices: list[int], adj) -> list[int]:
    best: list[int] = []

    def rec(rem: set[int], chosen: list[int]):
        nonlocal best
        # isolated vertices are always taken
        free = [v for v in rem if not (adj[v] & rem)]
        if free:
            rem = rem - set(free)
            chosen = chosen + free
        if not rem:
            if len(chosen) > len(best):
                best = sorted(chosen)
            return
        if len(chosen) + _clique_cover_bound(rem, adj) <= len(best):
            return
        v = min(rem, key=lambda u: (-len(adj[u] & rem), u))
        rec(rem - ({v} | adj[v]), chosen + [v])
        rec(rem - {v}, chosen)

    rec(set(vertices), [])
    return best


def _mis_greedy(vertices: list[int], adj) -> list[int]:
    rem, out = set(vertices), []
    while rem:
        v = min(rem, key=lambda u: (len(adj[u] & rem), u))
        out.append(v)
        rem -= {v} | adj[v]
    return sorted(out)


def maximum_independent_set(adj: dict[int, set[int]], exact_limit: int = EXACT_COMPONENT_LIMIT):
    """(vertex list, exact flag) for a graph given as adjacency sets."""
    out, exact = [], True
    for comp in _components(adj):
        cs = set(comp)
        if all(adj[v] >= cs - {v} for v in comp):  # clique
            out.append(comp[0])
        elif len(comp) <= exact_limit:
            out.extend(_mis_exact(comp, adj))
        else:
            out.extend(_mis_greedy(comp, adj))
            exact = False
    return sorted(out), exact


# -- separated sets --------------------------------------------------------------


@dataclass(frozen=True)
class SeparatedSetResult:
    cardinality: int
    witness: tuple[PeriodicPoint, ...]
    exact: bool


def conflict_graph(pool: Sequence[PeriodicPoint], eps, H, pairwise: bool = False):
    """Adjacency sets of the graph with an edge iff d_H <= eps.

    ``pairwise=True`` evaluates d_H on every pair instead of grouping by
    the separation window; it is slow and only used to cross-check.
    """
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    adj: dict[int, set[int]] = {i: set() for i in range(len(pool))}
    if pairwise:
        for i, j in itertools.combinations(range(len(pool)), 2):
            if metric_dH(H, pool[i], pool[j]) <= eps:
                adj[i].add(j)
                adj[j].add(i)
        return adj
    win = separation_window(H, eps).elements
    groups: dict[tuple, list[int]] = {}
    for i, x in enumerate(pool):
        groups.setdefault(x.window(win), []).append(i)
    for members in groups.values():
        for i in members:
            adj[i].update(m for m in members if m != i)
    return adj


def max_separated(pool, eps, H) -> SeparatedSetResult:
    """Largest (pool, eps, d_H)-separated subset of a finite pool."""
    H = as_subset(H)
    if len(H) == 0:
        raise InvalidArgument("empty window")
    pool = sorted(set(pool), key=PeriodicPoint.sort_key)
    if not pool:
        return SeparatedSetResult(0, (), True)
    adj = conflict_graph(pool, eps, H)
    idx, exact = maximum_independent_set(adj)
    return SeparatedSetResult(len(idx), tuple(pool[i] for i in idx), exact)


@dataclass(frozen=True)
class EntropyRow:
    n: int
    eps: Fraction
    count: int
    value: float
    y: PeriodicPoint
    exact: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps": str(self.eps),
            "count": self.count,
            "log_count_over_n": self.value,
            "y": str(self.y),
            "exact": self.exact,
        }


@dataclass
class EntropyEstimate:
    rows: list[EntropyRow]
    period: int
    eps_schedule: tuple
    windows: tuple
    note: str = (
        "sup over y is taken over periodic base points of the declared period; "
        "this is a finite-window surrogate, not the limit"
    )

    def values(self, eps=None) -> list[float]:
        return [r.value for r in self.rows if eps is None or r.eps == Fraction(eps)]

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "eps_schedule": [str(e) for e in self.eps_schedule],
            "windows": list(self.windows),
            "rows": [r.to_dict() for r in self.rows],
            "note": self.note,
        }


def _as_eps(e) -> Fraction:
    return Fraction(str(e)) if isinstance(e, float) else Fraction(e)


def relative_entropy_estimate(code: SlidingBlockCode, windows, eps, period: int) -> EntropyEstimate:
    """log(max_y #(pi^-1(y), eps, d_{G_n})) / n for each n in ``windows``.

    ``eps`` may be a single value or a schedule. Fibers are enumerated once
    per base point and reused across windows.
    """
    schedule = tuple(_as_eps(e) for e in (eps if isinstance(eps, (list, tuple)) else [eps]))
    fibers = []
    for y in code.target.points(period):
        fib = fiber_points(code, y, period)
        if fib:
            fibers.append((y, fib))
    if not fibers:
        raise EmptyFiber(f"no base point of period {period} has a nonempty fiber")
    rows = []
    for e in schedule:
        for n in windows:
            H = folner_window(n)
            best = None
            for y, fib in fibers:
                res = max_separated(fib, e, H)
                if best is None or res.cardinality > best[0].cardinality:
                    best = (res, y)
            res, y = best
            rows.append(EntropyRow(n, e, res.cardinality, math.log(res.cardinality) / n, y, res.exact))
    return EntropyEstimate(rows, period, schedule, tuple(windows))


# -- independence ------------------------------------------------------------------


def patterns(k: int):
    """All sigma in {1,2}^k in lexicographic order."""
    return list(itertools.product((1, 2), repeat=k))


@dataclass
class IndependenceCertificate:
    """Witnesses showing J is an independence set for (U1, U2).

    ``witnesses[sigma]`` lies over ``y`` and satisfies
    ``shift_action(h, x) in U_{sigma(h)}`` for each h in J (J sorted).
    """

    U1: Cylinder
    U2: Cylinder
    J: tuple[int, ...]
    y: PeriodicPoint
    witnesses: dict = field(default_factory=dict)

    def validate(self, code: SlidingBlockCode) -> bool:
        U = {1: self.U1, 2: self.U2}
        for sigma in patterns(len(self.J)):
            x = self.witnesses.get(sigma)
            if x is None:
                raise StructureError("missing-witness", f"no witness for {sigma}")
            if apply_factor(code, x) != self.y:
                raise StructureError("fiber-mismatch", f"witness for {sigma} is not over y")
            for h, s in zip(self.J, sigma):
                if not U[s].contains(x, at=h):
                    raise StructureError("target-membership", f"witness for {sigma} misses U{s} at {h}")
        return True

    def to_dict(self) -> dict:
        from .serialize import cylinder_to_dict

        return {
            "U1": cylinder_to_dict(self.U1),
            "U2": cylinder_to_dict(self.U2),
            "J": list(self.J),
            "y": str(self.y),
            "witnesses": {"".join(map(str, s)): str(x) for s, x in sorted(self.witnesses.items())},
        }


def is_independence_set(J, U1: Cylinder, U2: Cylinder, code: SlidingBlockCode, period: int,
                        budget: int = 200_000, max_size: int = MAX_INDEPENDENCE_SIZE):
    """An :class:`IndependenceCertificate` for J, or ``None`` if none exists at this period.

    The search ranges over every base point of the given period.
    """
    J = tuple(as_subset(J))
    if len(J) > max_size:
        raise ResourceLimit(f"|J| = {len(J)} exceeds the exact limit {max_size}")
    U = {1: U1, 2: U2}
    sigmas = patterns(len(J))
    copies = [[(h, U[s]) for h, s in zip(J, sigma)] for sigma in sigmas]
    y = find_common_fiber(code, period, copies, budget=budget)
    if y is None:
        return None
    wit = {}
    for sigma, cons in zip(sigmas, copies):
        word = solve_lift(code, period, y, cons)
        wit[sigma] = PeriodicPoint(word)
    return IndependenceCertificate(U1, U2, J, PeriodicPoint(y), wit)


@dataclass
class DensityResult:
    I: tuple[int, ...]
    ratio: Fraction
    certificate: IndependenceCertificate | None
    levels: list[int]


def independence_density(U1: Cylinder, U2: Cylinder, code: SlidingBlockCode, H, period: int,
                         budget: int = 200_000, max_size: int = MAX_INDEPENDENCE_SIZE) -> DensityResult:
    """Largest I inside H that is an independence set, and |I| / |H|.

    Level-wise search: a (k+1)-set is only tested when all its k-subsets
    passed, which is lossless because subsets of independence sets are
    independence sets. Ties are broken lexicographically.
    """
    H = as_subset(H)
    if len(H) == 0:
        raise InvalidArgument("empty window")
    if len(H) > max_size:
        raise ResourceLimit(f"|H| = {len(H)} exceeds the exact limit {max_size}")
    certs: dict[tuple, IndependenceCertificate] = {}
    level = []
    for h in H:
        c = is_independence_set((h,), U1, U2, code, period, budget)
        if c is not None:
            level.append((h,))
            certs[(h,)] = c
    sizes = [len(level)]
    best = level[0] if level else ()
    while level:
        passed = set(level)
        nxt = []
        for a, b in itertools.combinations(level, 2):
            if a[:-1] != b[:-1]:
                continue
            cand = a + (b[-1],)
            if any(cand[:i] + cand[i + 1 :] not in passed for i in range(len(cand))):
                continue
            c = is_independence_set(cand, U1, U2, code, period, budget)
            if c is not None:
                nxt.append(cand)
                certs[cand] = c
        nxt.sort()
        if nxt:
            best = nxt[0]
            sizes.append(len(nxt))
        level = nxt
    cert = certs.get(best) if best else None
    return DensityResult(best, Fraction(len(best), len(H)), cert, sizes)
