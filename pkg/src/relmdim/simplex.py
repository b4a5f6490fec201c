"""Simplices, faces, and a discrete model of the Lebesgue face condition.

Vertices of a simplex are numbered 1..n. A face is given by its support
I; its opposite face has support [n] minus I.

Grid model of Delta_n^k at resolution q: points are k-tuples of
compositions of q into n parts (coordinate a/q). Covers are sets of grid
points. A grid cover counts as *open* when every pair of grid-adjacent
points (one unit of mass moved inside one component) lies in a common
element, the discrete stand-in for a positive Lebesgue number.

Facet v of Delta_n is the facet missing vertex v. For pairs (U_j, v_j)
with U_j meeting facet v_j in component i, the facets intersect in the face
supported on [n] minus V, V = {v_j}, whose opposite face is supported on V
(all of Delta_n when V = [n]). The condition asks that no point of
the intersection of the U_j has component i supported inside V.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidArgument, ResourceLimit


@dataclass(frozen=True)
class SimplexPoint:
    coordinates: tuple[Fraction, ...]

    def __post_init__(self):
        c = tuple(Fraction(v) for v in self.coordinates)
        object.__setattr__(self, "coordinates", c)
        if not c or any(v < 0 for v in c) or sum(c) != 1:
            raise InvalidArgument("simplex coordinates must be nonnegative and sum to 1")

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @classmethod
    def vertex(cls, n: int, v: int) -> "SimplexPoint":
        return cls(tuple(Fraction(int(k == v)) for k in range(1, n + 1)))

    @classmethod
    def barycenter(cls, n: int) -> "SimplexPoint":
        return cls((Fraction(1, n),) * n)

    def support(self) -> frozenset:
        return frozenset(k + 1 for k, v in enumerate(self.coordinates) if v)


@dataclass(frozen=True)
class Face:
    n: int
    support: frozenset

    def __post_init__(self):
        s = frozenset(int(v) for v in self.support)
        object.__setattr__(self, "support", s)
        if not s or not s <= set(range(1, self.n + 1)):
            raise InvalidArgument("face support must be a nonempty subset of [n]")

    @property
    def size(self) -> int:
        return len(self.support)

    def contains(self, p: SimplexPoint) -> bool:
        return p.n == self.n and p.support() <= self.support


def opposite_face(F: Face) -> Face:
    rest = frozenset(range(1, F.n + 1)) - F.support
    if not rest:
        raise InvalidArgument("the full simplex has no opposite face")
    return Face(F.n, rest)


@dataclass(frozen=True)
class ProductPoint:
    components: tuple[SimplexPoint, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps or len({c.n for c in comps}) != 1:
            raise InvalidArgument("product components must share one simplex")

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def k(self) -> int:
        return len(self.components)

    def in_coordinate_face(self, F: Face, i: int) -> bool:
        """Membership in F_i (i is 0-based)."""
        return F.contains(self.components[i])


# -- grid model --------------------------------------------------------------------


def compositions(q: int, n: int) -> list[tuple[int, ...]]:
    if n == 1:
        return [(q,)]
    return [(a,) + rest for a in range(q, -1, -1) for rest in compositions(q - a, n - 1)]


class SimplexGrid:
    """Barycentric grid of Delta_n^k with bitmask helpers."""

    def __init__(self, n: int, k: int, q: int):
        if n < 1 or k < 1 or q < 1:
            raise InvalidArgument("n, k, q must be positive")
        self.n, self.k, self.q = n, k, q
        single = compositions(q, n)
        self.points: list[tuple[tuple[int, ...], ...]] = [tuple(p) for p in itertools.product(single, repeat=k)]
        self.index = {p: j for j, p in enumerate(self.points)}
        self.full = (1 << len(self.points)) - 1
        # facet_mask[i][v]: points whose component i has coordinate v equal to 0
        self.facet_mask = [[0] * (n + 1) for _ in range(k)]
        for j, p in enumerate(self.points):
            for i in range(k):
                for v in range(1, n + 1):
                    if p[i][v - 1] == 0:
                        self.facet_mask[i][v] |= 1 << j
        self.edges = self._edges()

    def __len__(self):
        return len(self.points)

    def _edges(self) -> list[tuple[int, int]]:
        out = []
        for j, p in enumerate(self.points):
            for i in range(self.k):
                c = p[i]
                for a in range(self.n):
                    if c[a] == 0:
                        continue
                    for b in range(self.n):
                        if b == a:
                            continue
                        nc = list(c)
                        nc[a] -= 1
                        nc[b] += 1
                        other = self.index[p[:i] + (tuple(nc),) + p[i + 1 :]]
                        if j < other:
                            out.append((j, other))
        return out

    def face_mask(self, i: int, support: frozenset) -> int:
        """Points whose component i is supported inside ``support``."""
        m = self.full
        for v in range(1, self.n + 1):
            if v not in support:
                m &= self.facet_mask[i][v]
        return m

    def mask(self, predicate) -> int:
        m = 0
        for j, p in enumerate(self.points):
            if predicate(tuple(tuple(Fraction(a, self.q) for a in c) for c in p)):
                m |= 1 << j
        return m


@dataclass(frozen=True)
class GridCover:
    grid: SimplexGrid
    masks: tuple[int, ...]

    def covers(self) -> bool:
        u = 0
        for m in self.masks:
            u |= m
        return u == self.grid.full and all(self.masks)

    def is_open(self) -> bool:
        return all(any((m >> a) & 1 and (m >> b) & 1 for m in self.masks) for a, b in self.grid.edges)

    def is_valid(self) -> bool:
        return self.covers() and self.is_open()

    def ord(self) -> int:
        best = 0
        for j in range(len(self.grid)):
            best = max(best, sum((m >> j) & 1 for m in self.masks))
        return best - 1


@dataclass
class LebesgueCheck:
    ok: bool
    violation: tuple | None
    nodes: int


def lebesgue_condition_check(cover: GridCover, m_max: int | None = None, budget: int = 1_000_000) -> LebesgueCheck:
    """Exhaustive check of the face condition on a grid cover.

    Pairs (U, v) with U meeting facet v in component i are combined by
    depth-first search; a branch stops once the running intersection is
    empty, since every extension then satisfies the condition.
    """
    g = cover.grid
    nodes = 0
    for i in range(g.k):
        pairs = [
            (u, v)
            for u, m in enumerate(cover.masks)
            for v in range(1, g.n + 1)
            if m & g.facet_mask[i][v]
        ]
        limit = len(pairs) if m_max is None else m_max

        def rec(start, inter, V, chosen):
            nonlocal nodes
            for t in range(start, len(pairs)):
                u, v = pairs[t]
                nodes += 1
                if nodes > budget:
                    raise ResourceLimit(f"Lebesgue condition scan exceeded {budget} nodes")
                ni = inter & cover.masks[u]
                if not ni:
                    continue
                nV = V | {v}
                bad = ni & g.face_mask(i, frozenset(nV))
                nc = chosen + [(u, v)]
                if bad:
                    j = (bad & -bad).bit_length() - 1
                    return (i, tuple(nc), g.points[j])
                if len(nc) < limit:
                    found = rec(t + 1, ni, nV, nc)
                    if found:
                        return found
            return None

        found = rec(0, g.full, frozenset(), [])
        if found:
            return LebesgueCheck(False, found, nodes)
    return LebesgueCheck(True, None, nodes)


# -- structured covers ------------------------------------------------------------------


def star_cover_masks(grid: SimplexGrid, core: Fraction) -> list[int]:
    """Top-set cover of one simplex factor, lifted to every component.

    For each proper nonempty S the set of points whose coordinates on S all
    exceed every coordinate off S; plus a core of points with all
    coordinates above ``core``. Products over components are formed.
    """
    n = grid.n
    per_component: list[list] = []
    subsets = [frozenset(S) for r in range(1, n) for S in itertools.combinations(range(n), r)]

    def top_set(S):
        return lambda c: min(c[a] for a in S) > max(c[b] for b in range(n) if b not in S)

    preds = [top_set(S) for S in subsets] + [lambda c: min(c) > core]
    for _ in range(grid.k):
        per_component.append(preds)
    masks = []
    for combo in itertools.product(*per_component):
        m = grid.mask(lambda p, combo=combo: all(f(c) for f, c in zip(combo, p)))
        if m:
            masks.append(m)
    return masks


@dataclass
class OracleReport:
    n: int
    k: int
    q: int
    seed: int
    budget: int
    grid_points: int
    exhaustive: dict
    structured: dict
    randomized: dict
    min_ord_found: int | None
    relation: str
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "q": self.q,
            "seed": self.seed,
            "budget": self.budget,
            "grid_points": self.grid_points,
            "exhaustive": self.exhaustive,
            "structured": self.structured,
            "randomized": self.randomized,
            "min_ord_found": self.min_ord_found,
            "nk": self.n * self.k,
            "n_minus_1_k": (self.n - 1) * self.k,
            "relation": self.relation,
            "notes": self.notes,
        }

    def csv_row(self) -> dict:
        return {"n": self.n, "k": self.k, "q": self.q, "seed": self.seed, "min_ord_found": self.min_ord_found}


def _passes(cover: GridCover, budget: int) -> bool:
    if not cover.is_valid():
        return False
    try:
        return lebesgue_condition_check(cover, budget=budget).ok
    except ResourceLimit:
        return False


def _exhaustive_small(grid: SimplexGrid, budget: int) -> dict:
    """All covers with at most two elements (assignment of each point to A, B or both)."""
    N = len(grid)
    total = 1 + 3 ** N
    if total > budget:
        return {"complete": False, "reason": f"3^{N} assignments exceed the budget", "checked": 0,
                "valid_open_covers": 0, "condition_covers": 0, "min_ord": None, "ords_found": []}
    found_ords = set()
    valid = 0
    passing = 0
    checked = 0
    single = GridCover(grid, (grid.full,))
    checked += 1
    if single.is_valid():
        valid += 1
        if lebesgue_condition_check(single).ok:
            passing += 1
            found_ords.add(single.ord())
    edges = grid.edges
    # label 0 -> A only, 1 -> B only, 2 -> both; A and B nonempty
    for labels in itertools.product((0, 1, 2), repeat=N):
        checked += 1
        A = B = 0
        for j, lab in enumerate(labels):
            if lab != 1:
                A |= 1 << j
            if lab != 0:
                B |= 1 << j
        if not A or not B:
            continue
        ok = True
        for a, b in edges:
            if not (((A >> a) & 1 and (A >> b) & 1) or ((B >> a) & 1 and (B >> b) & 1)):
                ok = False
                break
        if not ok:
            continue
        valid += 1
        cov = GridCover(grid, (A, B))
        if lebesgue_condition_check(cov).ok:
            passing += 1
            found_ords.add(cov.ord())
    return {
        "complete": True,
        "checked": checked,
        "valid_open_covers": valid,
        "condition_covers": passing,
        "ords_found": sorted(found_ords),
        "min_ord": min(found_ords) if found_ords else None,
    }


def lebesgue_ord_oracle(n: int, k: int, q: int, budget: int = 2_000_000, seed: int = 0,
                        random_trials: int = 200) -> OracleReport:
    """Search grid covers passing the face condition and record the least ord seen.

    Three sources: every cover with at most two elements (when 3^N fits the
    budget), top-set covers for a range of core thresholds, and seeded
    random merges and deletions applied to those.
    """
    if n * k > 4:
        raise InvalidArgument("oracle restricted to n*k <= 4")
    if q > 12:
        raise InvalidArgument("oracle restricted to q <= 12")
    grid = SimplexGrid(n, k, q)
    rng = random.Random(seed)
    notes = []

    exhaustive = _exhaustive_small(grid, budget)
    if not exhaustive["complete"]:
        notes.append("exhaustive two-element search skipped: " + exhaustive["reason"])

    structured_ords = []
    pool: list[GridCover] = []
    for num in range(1, q):
        core = Fraction(num, q * n) if n > 1 else Fraction(0)
        cov = GridCover(grid, tuple(star_cover_masks(grid, core)))
        if _passes(cov, budget):
            structured_ords.append({"core": str(core), "elements": len(cov.masks), "ord": cov.ord()})
            pool.append(cov)
    structured = {
        "family": "top-set covers with a central core",
        "passing": len(structured_ords),
        "covers": structured_ords,
        "min_ord": min((c["ord"] for c in structured_ords), default=None),
    }

    rand_best = None
    tried = 0
    passing = 0
    for _ in range(random_trials if pool else 0):
        tried += 1
        base = list(rng.choice(pool).masks)
        for _ in range(rng.randint(1, 4)):
            move = rng.random()
            if move < 0.2 and len(base) >= 2:
                a, b = rng.sample(range(len(base)), 2)
                merged = base[a] | base[b]
                base = [m for t, m in enumerate(base) if t not in (a, b)] + [merged]
            elif move < 0.4 and len(base) >= 2:
                base.pop(rng.randrange(len(base)))
            else:
                # shrinking an element never breaks the face condition
                a = rng.randrange(len(base))
                bits = [j for j in range(len(grid)) if (base[a] >> j) & 1]
                if len(bits) > 1:
                    base[a] &= ~(1 << rng.choice(bits))
        cov = GridCover(grid, tuple(base))
        if _passes(cov, budget):
            passing += 1
            o = cov.ord()
            rand_best = o if rand_best is None else min(rand_best, o)
    randomized = {"trials": tried, "passing": passing, "min_ord": rand_best}

    candidates = [v for v in (exhaustive.get("min_ord"), structured["min_ord"], rand_best) if v is not None]
    best = min(candidates) if candidates else None
    nk, n1k = n * k, (n - 1) * k
    if best is None:
        relation = "no condition-satisfying cover found within budget; nothing to compare"
    elif best < n1k:
        relation = f"found ord {best} below both n*k = {nk} and (n-1)*k = {n1k}; the grid model disagrees with both forms"
    elif best < nk:
        relation = (
            f"found a condition-satisfying cover with ord {best} < n*k = {nk}; the n*k form fails on this model, "
            f"while the (n-1)*k = {n1k} form is consistent with every cover found"
        )
    else:
        relation = f"least ord found is {best} >= n*k = {nk}; no cover undercuts either form"
    if exhaustive.get("complete") and exhaustive["min_ord"] is None:
        notes.append("no cover with at most two elements satisfies the condition")
    return OracleReport(n, k, q, seed, budget, len(grid), exhaustive, structured, randomized, best, relation, notes)


def oracle_csv(reports: Sequence[OracleReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "k", "q", "seed", "min_ord_found"], lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()
