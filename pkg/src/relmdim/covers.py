"""Finite covers: ord, pool-restricted refinement minimum, and coordinate Widim bounds.

Covers live on a finite ground set. For interval experiments the ground is
the set of points k/(2q), 0 <= k <= 2q, i.e. the vertices and edge
midpoints of the uniform grid on [0, 1]; an index range is *open* when each
end is either an edge midpoint (odd index) or an end of [0, 1]. Two open
ranges that cover a common vertex boundary must overlap on an edge, which
is what keeps the discrete model one-dimensional.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidArgument, ResourceLimit, StructureError
from .group import as_subset
from .symbolic import Cylinder, PeriodicPoint, SlidingBlockCode, fiber_points, metric_dH


@dataclass(frozen=True)
class Cover:
    ground: tuple
    elements: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(self.ground))
        els = tuple(frozenset(e) for e in self.elements)
        object.__setattr__(self, "elements", els)
        g = set(self.ground)
        if any(not e for e in els):
            raise InvalidArgument("cover elements must be nonempty")
        if any(not e <= g for e in els):
            raise InvalidArgument("cover element leaves the ground set")
        if set().union(*els) != g:
            raise InvalidArgument("elements do not cover the ground set")

    def multiplicity(self, point) -> int:
        return sum(1 for e in self.elements if point in e)

    def refines(self, other: "Cover") -> bool:
        return all(any(e <= f for f in other.elements) for e in self.elements)


def ord_of(cover: Cover) -> int:
    """Largest number of elements through one point, minus one."""
    return max(cover.multiplicity(p) for p in cover.ground) - 1


def min_ord_refinement(cover: Cover, pool: Iterable, include_cover: bool = True):
    """(minimum ord, refining cover) over covers assembled from ``pool``.

    Only pool sets lying inside a single element of ``cover`` are usable.
    The search is exact over the declared pool, so the result is an upper
    bound for the topological refinement minimum of the modelled space.
    """
    sets = {frozenset(s) for s in pool}
    if include_cover:
        sets |= set(cover.elements)
    if not sets:
        raise InvalidArgument("empty candidate pool")
    usable = sorted(
        (s for s in sets if s and any(s <= e for e in cover.elements)),
        key=lambda s: (-len(s), sorted(map(repr, s))),
    )
    ground = list(cover.ground)
    if not usable or set().union(*usable) != set(ground):
        raise StructureError("no-refinement", "pool sets inside cover elements do not cover the ground")
    through = {p: [k for k, s in enumerate(usable) if p in s] for p in ground}

    def search(cap: int):
        mult = {p: 0 for p in ground}
        chosen: list[int] = []

        def rec():
            open_pts = [p for p in ground if mult[p] == 0]
            if not open_pts:
                return True
            p = min(open_pts, key=lambda q: len(through[q]))
            for k in through[p]:
                s = usable[k]
                if all(mult[q] < cap for q in s):
                    for q in s:
                        mult[q] += 1
                    chosen.append(k)
                    if rec():
                        return True
                    chosen.pop()
                    for q in s:
                        mult[q] -= 1
            return False

        return [usable[k] for k in chosen] if rec() else None

    for cap in range(1, len(usable) + 1):
        found = search(cap)
        if found is not None:
            beta = Cover(cover.ground, tuple(found))
            return ord_of(beta), beta
    raise AssertionError("the usable pool covers the ground")


# -- interval model ------------------------------------------------------------------


def interval_ground(q: int) -> tuple[int, ...]:
    """Indices k standing for the points k/(2q) of [0, 1]."""
    if q < 1:
        raise InvalidArgument("resolution must be positive")
    return tuple(range(2 * q + 1))


def is_open_range(lo: int, hi: int, q: int) -> bool:
    top = 2 * q
    return 0 <= lo <= hi <= top and (lo == 0 or lo % 2 == 1) and (hi == top or hi % 2 == 1)


def open_interval_pool(q: int) -> list[frozenset]:
    """All open index ranges: the connected open subsets of the model."""
    top = 2 * q
    return [
        frozenset(range(lo, hi + 1))
        for lo in range(top + 1)
        for hi in range(lo, top + 1)
        if is_open_range(lo, hi, q)
    ]


def interval_cover(q: int, intervals: Sequence[tuple]) -> Cover:
    """Cover from real intervals ``(lo, hi, closed_lo, closed_hi)``.

    Each element is the set of grid indices whose point lies in the interval.
    """
    ground = interval_ground(q)
    els = []
    for lo, hi, closed_lo, closed_hi in intervals:
        lo, hi = Fraction(str(lo)), Fraction(str(hi))
        pts = []
        for k in ground:
            x = Fraction(k, 2 * q)
            above = x >= lo if closed_lo else x > lo
            below = x <= hi if closed_hi else x < hi
            if above and below:
                pts.append(k)
        els.append(frozenset(pts))
    return Cover(ground, tuple(els))


# -- coordinate embeddings -----------------------------------------------------------


def _far_radius(eps: Fraction) -> int:
    """Largest r with 2^-r >= eps (eps <= 1)."""
    r = 0
    while Fraction(1, 2 ** (r + 1)) >= eps:
        r += 1
    return r


@dataclass(frozen=True)
class WidimBound:
    dimension: int
    coordinates: tuple[int, ...]


def widim_upper(fiber: Sequence[PeriodicPoint], eps, H) -> WidimBound:
    """Coordinate-map upper bound for Widim_eps(fiber, d_H).

    Coordinates are picked greedily (most still-unsplit far pairs first,
    then smallest |position|) until every pair with d_H >= eps is split,
    so the map x -> (x_s) for s in C is an eps-embedding into a cube of
    dimension |C|.
    """
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    H = as_subset(H)
    pts = sorted(set(fiber), key=PeriodicPoint.sort_key)
    if len(pts) <= 1 or eps > 1:
        return WidimBound(0, ())
    far = [(x, y) for x, y in itertools.combinations(pts, 2) if metric_dH(H, x, y) >= eps]
    if not far:
        return WidimBound(0, ())
    candidates = sorted(H.thicken(_far_radius(eps)), key=lambda s: (abs(s), s))
    chosen: list[int] = []
    remaining = far
    while remaining:
        best = max(candidates, key=lambda s: sum(1 for x, y in remaining if x[s] != y[s]))
        gain = [(x, y) for x, y in remaining if x[best] != y[best]]
        if not gain:
            raise AssertionError("far pairs always differ inside the thickened window")
        chosen.append(best)
        remaining = [(x, y) for x, y in remaining if x[best] == y[best]]
    return WidimBound(len(chosen), tuple(sorted(chosen)))


@dataclass
class Prop23Check:
    left: int
    right: int
    holds: bool
    fiber_size: int
    joined_cover_size: int


def joined_cover(alpha: Sequence[Cylinder], H, points: Sequence[PeriodicPoint], limit: int = 4096) -> Cover:
    """The join of s^-1 alpha over s in H, restricted to ``points``."""
    H = tuple(as_subset(H))
    if len(alpha) ** len(H) > limit:
        raise ResourceLimit("join of the cover over H is too large to enumerate")
    els = set()
    for choice in itertools.product(range(len(alpha)), repeat=len(H)):
        e = frozenset(x for x in points if all(alpha[c].contains(x, at=s) for s, c in zip(H, choice)))
        if e:
            els.add(e)
    return Cover(tuple(points), tuple(sorted(els, key=lambda e: sorted(map(PeriodicPoint.sort_key, e)))))


def prop23_inequality_check(code: SlidingBlockCode, alpha: Sequence[Cylinder], lebesgue_number, H,
                            y: PeriodicPoint, period: int) -> Prop23Check:
    """Compare the refinement minimum of alpha_H on a fiber with its coordinate Widim bound.

    The pool for the left side holds the joined cover's own elements and
    the level sets of the coordinate map from :func:`widim_upper`; each
    level set must sit inside one joined element, which is where the
    Lebesgue number enters.
    """
    fiber = fiber_points(code, y, period)
    if not fiber:
        raise InvalidArgument("empty fiber")
    beta = joined_cover(alpha, H, fiber)
    wb = widim_upper(fiber, lebesgue_number, H)
    level_sets: dict[tuple, set] = {}
    for x in fiber:
        level_sets.setdefault(tuple(x[s] for s in wb.coordinates), set()).add(x)
    pool = [frozenset(s) for s in level_sets.values()]
    for s in pool:
        if not any(s <= e for e in beta.elements):
            raise StructureError("lebesgue-number", "a level set of the embedding is not inside one cover element")
    left, _ = min_ord_refinement(beta, pool)
    return Prop23Check(left, wb.dimension, left <= wb.dimension, len(fiber), len(beta.elements))
