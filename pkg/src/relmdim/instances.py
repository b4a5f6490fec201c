"""Seeded instance generators shared by tests, scripts and the CLI battery."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .combinatorics import PatternFamily, balanced_patterns
from .symbolic import PeriodicPoint, full_shift
from .transport import EmpiricalMeasure


def random_ind_instance(N: int, d, tau, rng: random.Random):
    """(E, S', {E_sigma}) meeting the extraction hypotheses at the threshold.

    |S'| is the least integer above d |S_E|; each |E_sigma| is drawn
    uniformly between the least integer above tau N and N.
    """
    d, tau = Fraction(d), Fraction(tau)
    E = tuple(range(N))
    S_E = sorted(balanced_patterns(E).patterns)
    size = math.floor(d * len(S_E)) + 1
    chosen = rng.sample(S_E, size)
    low = math.floor(tau * N) + 1
    subsets = {}
    for s in sorted(chosen):
        k = rng.randint(low, N)
        subsets[s] = frozenset(rng.sample(E, k))
    return E, PatternFamily(E, frozenset(chosen)), subsets


def random_family(W: int, size: int, rng: random.Random) -> PatternFamily:
    """``size`` distinct random patterns on range(W)."""
    codes = rng.sample(range(2 ** W), size)
    pats = {tuple(1 + ((c >> k) & 1) for k in range(W)) for c in codes}
    return PatternFamily(tuple(range(W)), frozenset(pats))


def random_measure(rng: random.Random, atoms: int, period: int, alphabet: int = 2) -> EmpiricalMeasure:
    """Random rational weights on distinct random points of the full shift."""
    words = full_shift(alphabet).words(period)
    pts = sorted({PeriodicPoint(w) for w in rng.sample(words, min(atoms, len(words)))})
    raw = [rng.randint(1, 6) for _ in pts]
    tot = sum(raw)
    return EmpiricalMeasure(tuple((x, Fraction(r, tot)) for x, r in zip(pts, raw)))


def projection_measure_data(E, L: int, period: int, rng: random.Random | None = None):
    """Measure-level independence data for the product projection.

    For each balanced sigma the L atoms carry sigma in their second
    coordinate on E; first coordinates (the base points) are shared across
    sigma. Returns ``{sigma: [x_1, .., x_L]}``.
    """
    E = tuple(sorted(E))
    rng = rng or random.Random(0)
    bases = [tuple(rng.randint(0, 1) for _ in range(period)) for _ in range(L)]
    data = {}
    for s in sorted(balanced_patterns(E).patterns):
        lst = []
        for base in bases:
            second = [rng.randint(0, 1) for _ in range(period)]
            for h, v in zip(E, s):
                second[h % period] = v - 1
            lst.append(PeriodicPoint(tuple(2 * a + b for a, b in zip(base, second))))
        data[s] = lst
    return data


def random_psi_structure(rng: random.Random, H: int, m: int):
    """A Psi structure on the full 2-shift over the one-point system.

    V1 = [0 at 0], V2 = [1 at 0]; block i occupies positions
    g_i .. g_i + H - 1 with g_i = i (H + 1); free positions are random.
    """
    from .meandim import PsiStructure
    from .entropy import patterns
    from .group import folner_window
    from .symbolic import Cylinder, point_code

    code = point_code(full_shift(2))
    V1, V2 = Cylinder.at(0, [0]), Cylinder.at(0, [1])
    translates = tuple(i * (H + 1) for i in range(m))
    blocks = tuple(tuple(g + j for j in range(H)) for g in translates)
    period = m * (H + 1) + 2
    witnesses = {}
    for E in itertools.product(patterns(H), repeat=m):
        word = [rng.randint(0, 1) for _ in range(period)]
        for blk, pat in zip(blocks, E):
            for pos, v in zip(blk, pat):
                word[pos] = v - 1
        witnesses[E] = PeriodicPoint(tuple(word))
    delta = Fraction(1, 2 ** (H + 1))
    y = PeriodicPoint((0,))
    return PsiStructure(code, H, blocks, translates, witnesses, V1, V2, y, delta, folner_window(period))


def random_product_point(rng: random.Random, n: int, k: int, max_support: int | None = None):
    from .simplex import ProductPoint, SimplexPoint

    comps = []
    for _ in range(k):
        size = rng.randint(1, n if max_support is None else min(n, max_support))
        supp = rng.sample(range(n), size)
        raw = [rng.randint(1, 5) for _ in supp]
        coords = [Fraction(0)] * n
        for j, w in zip(supp, raw):
            coords[j] = Fraction(w, sum(raw))
        comps.append(SimplexPoint(tuple(coords)))
    return ProductPoint(tuple(comps))


def random_face(rng: random.Random, n: int):
    from .simplex import Face

    return Face(n, frozenset(rng.sample(range(1, n + 1), rng.randint(1, n - 1))))
