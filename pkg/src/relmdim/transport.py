"""Finitely supported measures on periodic points and exact Wasserstein-1.

Weights are :class:`~fractions.Fraction` throughout. The primal distance
comes from a min-cost-flow solver, the dual (1-Lipschitz potentials) from a
simplex on the Kantorovich LP; the two never share code, which is what makes
the strong-duality check in the tests meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InvalidArgument, NoSeparation
from .group import as_subset
from .lp import min_cost_transport, simplex_max
from .symbolic import (
    Cylinder,
    PeriodicPoint,
    SlidingBlockCode,
    apply_factor,
    metric_d,
    shift_action,
    word_str,
)

Metric = Callable[[PeriodicPoint, PeriodicPoint], Fraction]


@dataclass(frozen=True)
class EmpiricalMeasure:
    """A probability measure with finitely many atoms, sorted by point."""

    atoms: tuple[tuple[PeriodicPoint, Fraction], ...]

    def __post_init__(self):
        merged: dict[PeriodicPoint, Fraction] = {}
        for x, w in self.atoms:
            w = Fraction(w)
            if w < 0:
                raise InvalidArgument("negative weight")
            if w == 0:
                continue
            merged[x] = merged.get(x, Fraction(0)) + w
        if sum(merged.values()) != 1:
            raise InvalidArgument(f"weights sum to {sum(merged.values())}, not 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items(), key=lambda a: a[0].sort_key())))

    @classmethod
    def uniform(cls, points: Sequence[PeriodicPoint]) -> "EmpiricalMeasure":
        """(1/n) sum of Dirac masses, with repetitions counted."""
        if not points:
            raise InvalidArgument("uniform measure needs at least one point")
        n = len(points)
        return cls(tuple((x, Fraction(1, n)) for x in points))

    @property
    def support(self) -> tuple[PeriodicPoint, ...]:
        return tuple(x for x, _ in self.atoms)

    def weight(self, x: PeriodicPoint) -> Fraction:
        for y, w in self.atoms:
            if y == x:
                return w
        return Fraction(0)

    def as_dict(self) -> dict:
        return dict(self.atoms)

    def mix(self, t, other: "EmpiricalMeasure") -> "EmpiricalMeasure":
        """t * self + (1 - t) * other."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise InvalidArgument("mixing weight must lie in [0, 1]")
        return EmpiricalMeasure(
            tuple((x, t * w) for x, w in self.atoms) + tuple((x, (1 - t) * w) for x, w in other.atoms)
        )

    def to_dict(self) -> dict:
        return {
            "atoms": [
                {"word": word_str(x.word), "period": x.period, "weight": str(w)} for x, w in self.atoms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmpiricalMeasure":
        atoms = []
        for a in data["atoms"]:
            word = a["word"]
            if isinstance(word, str):
                word = [int(c) for c in word.split(",")] if "," in word else [int(c) for c in word]
            x = PeriodicPoint(tuple(word))
            if "period" in a and len(word) != int(a["period"]):
                raise InvalidArgument(f"atom {a['word']} does not have period {a['period']}")
            atoms.append((x, Fraction(a["weight"])))
        return cls(tuple(atoms))


def combination(terms: Iterable[tuple[Fraction, EmpiricalMeasure]]) -> EmpiricalMeasure:
    """sum_k c_k mu_k for nonnegative c_k summing to 1."""
    atoms = []
    for c, mu in terms:
        c = Fraction(c)
        atoms.extend((x, c * w) for x, w in mu.atoms)
    return EmpiricalMeasure(tuple(atoms))


def dirac(x: PeriodicPoint) -> EmpiricalMeasure:
    return EmpiricalMeasure(((x, Fraction(1)),))


@dataclass(frozen=True)
class InducedMap:
    """mu -> mu o pi^-1 for a sliding block code pi."""

    code: SlidingBlockCode


def pushforward(mapping, mu: EmpiricalMeasure) -> EmpiricalMeasure:
    """Push mu forward by a group element (g mu = mu o g^-1) or an induced map."""
    if isinstance(mapping, InducedMap):
        f = lambda x: apply_factor(mapping.code, x)  # noqa: E731
    elif isinstance(mapping, SlidingBlockCode):
        f = lambda x: apply_factor(mapping, x)  # noqa: E731
    elif isinstance(mapping, int):
        f = lambda x: shift_action(mapping, x)  # noqa: E731
    else:
        raise InvalidArgument(f"cannot push forward by {mapping!r}")
    return EmpiricalMeasure(tuple((f(x), w) for x, w in mu.atoms))


@dataclass(frozen=True)
class TransportPlan:
    sources: tuple[PeriodicPoint, ...]
    targets: tuple[PeriodicPoint, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def marginals(self):
        rows = [sum(r, Fraction(0)) for r in self.matrix]
        cols = [sum((r[j] for r in self.matrix), Fraction(0)) for j in range(len(self.targets))]
        return rows, cols

    def cost(self, metric: Metric = metric_d) -> Fraction:
        return sum(
            (self.matrix[i][j] * metric(x, y) for i, x in enumerate(self.sources) for j, y in enumerate(self.targets)),
            Fraction(0),
        )


def wasserstein1(mu: EmpiricalMeasure, nu: EmpiricalMeasure, metric: Metric = metric_d):
    """Exact W_1(mu, nu) and an optimal coupling."""
    xs, ys = mu.support, nu.support
    cost = [[metric(x, y) for y in ys] for x in xs]
    value, flow = min_cost_transport([w for _, w in mu.atoms], [w for _, w in nu.atoms], cost)
    return value, TransportPlan(xs, ys, tuple(tuple(r) for r in flow))


def dual_objective(f: dict, mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> Fraction:
    """int f dmu - int f dnu."""
    return sum((w * f[x] for x, w in mu.atoms), Fraction(0)) - sum((w * f[x] for x, w in nu.atoms), Fraction(0))


def is_one_lipschitz(f: dict, metric: Metric = metric_d) -> bool:
    pts = list(f)
    return all(abs(f[a] - f[b]) <= metric(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :])


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def kantorovich_dual(mu: EmpiricalMeasure, nu: EmpiricalMeasure, metric: Metric = metric_d):
    """sup over 1-Lipschitz f of int f dmu - int f dnu, with an optimal f.

    The LP lives on the atoms where mu and nu differ; an optimal f shifted to
    have minimum 0 takes values in [0, max distance], which bounds the LP.
    The potential is extended to the rest of the joint support by the
    McShane formula f(x) = min_a f(a) + d(x, a).
    """
    joint = sorted(set(mu.support) | set(nu.support), key=PeriodicPoint.sort_key)
    md, nd = mu.as_dict(), nu.as_dict()
    diff = {x: md.get(x, Fraction(0)) - nd.get(x, Fraction(0)) for x in joint}
    pts = [x for x in joint if diff[x] != 0]
    if not pts:
        return Fraction(0), {x: Fraction(0) for x in joint}
    k = len(pts)
    D = [[metric(a, b) for b in pts] for a in pts]
    dscale = _lcm_den(v for row in D for v in row)
    cscale = _lcm_den(diff[x] for x in pts)
    Di = [[int(v * dscale) for v in row] for row in D]
    c = [int(diff[x] * cscale) for x in pts]
    dmax = max(max(row) for row in Di)
    A, b = [], []
    for a in range(k):
        for bb in range(k):
            if a != bb:
                row = [0] * k
                row[a], row[bb] = 1, -1
                A.append(row)
                b.append(Di[a][bb])
        row = [0] * k
        row[a] = 1
        A.append(row)
        b.append(dmax)
    val, g = simplex_max(c, A, b)
    f = {x: Fraction(g[i]) / dscale for i, x in enumerate(pts)}
    value = Fraction(val) / (dscale * cscale)
    for x in joint:
        if x not in f:
            f[x] = min(f[a] + metric(x, a) for a in pts)
    return value, {x: f[x] for x in joint}


def _shift_residues(W, measures) -> list[int]:
    L = 1
    for m in measures:
        for x in m.support:
            L = math.lcm(L, x.period)
    seen, out = set(), []
    for s in W:
        r = s % L
        if r not in seen:
            seen.add(r)
            out.append(s)
    return out


def wasserstein_window_witness(W, mu: EmpiricalMeasure, nu: EmpiricalMeasure):
    """(max over s in W of W_1(s mu, s nu), a maximizing s).

    Shifts are reduced modulo the common period of the atoms, which leaves
    the maximum unchanged.
    """
    W = as_subset(W)
    if len(W) == 0:
        raise InvalidArgument("empty window")
    best = None
    for s in _shift_residues(W, (mu, nu)):
        v, _ = wasserstein1(pushforward(s, mu), pushforward(s, nu))
        if best is None or v > best[0]:
            best = (v, s)
    return best


def wasserstein_window(W, mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> Fraction:
    """W_{W}(mu, nu) = max over s in W of W_1(s mu, s nu)."""
    return wasserstein_window_witness(W, mu, nu)[0]


def measure_of_cylinder(mu: EmpiricalMeasure, S) -> Fraction:
    """mu(S) for a :class:`Cylinder`, a callable predicate or a set of points."""
    if isinstance(S, Cylinder):
        pred = S.contains
    elif callable(S):
        pred = S
    else:
        members = set(S)
        pred = members.__contains__
    return sum((w for x, w in mu.atoms if pred(x)), Fraction(0))


@dataclass(frozen=True)
class Separation:
    """Open sets A, B (unions of cylinders on one window) with mu(A) + nu(B) > 1.

    A and B use disjoint word sets on the same coordinates, so they are
    disjoint clopen sets. ``threshold`` and ``margin`` record the level r and
    gap delta of the indicator functional f = 1_A that separates them.
    """

    A: Cylinder
    B: Cylinder
    mass: Fraction
    radius: int
    threshold: Fraction = Fraction(1, 2)
    margin: Fraction = Fraction(1, 4)


def separate_measures(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> Separation:
    if mu == nu:
        raise NoSeparation("the two measures are equal")
    pts = sorted(set(mu.support) | set(nu.support), key=PeriodicPoint.sort_key)
    R = 0
    while True:
        offs = tuple(range(-R, R + 1))
        keys = {x.window(offs) for x in pts}
        if len(keys) == len(pts):
            break
        R += 1
    md, nd = mu.as_dict(), nu.as_dict()
    pos = {x.window(offs) for x in pts if md.get(x, 0) > nd.get(x, 0)}
    rest = {y.window(offs) for y in nu.support} - pos
    A = Cylinder(offs, frozenset(pos))
    B = Cylinder(offs, frozenset(rest))
    mass = measure_of_cylinder(mu, A) + measure_of_cylinder(nu, B)
    if not (mass > 1 and A.is_disjoint(B)):  # pragma: no cover - guaranteed by construction
        raise NoSeparation("construction failed")
    return Separation(A, B, mass, R)


def approximate_in_Rn(mu1: EmpiricalMeasure, mu2: EmpiricalMeasure, code: SlidingBlockCode):
    """Write a pair with equal push-forwards as a pair of uniform n-point measures.

    Returns ``(n, xs1, xs2)`` where n is the lcm of all weight denominators
    and ``EmpiricalMeasure.uniform(xs_k) == mu_k`` exactly.
    """
    ind = InducedMap(code)
    if pushforward(ind, mu1) != pushforward(ind, mu2):
        raise InvalidArgument("the pair is not in the relation: push-forwards differ")
    n = _lcm_den(w for m in (mu1, mu2) for _, w in m.atoms)

    def expand(mu):
        out = []
        for x, w in mu.atoms:
            out.extend([x] * int(w * n))
        return tuple(out)

    return n, expand(mu1), expand(mu2)
