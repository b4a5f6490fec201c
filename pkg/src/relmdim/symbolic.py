"""Subshifts over finite alphabets, periodic points and sliding block codes.

A point is a bi-infinite periodic sequence ``x`` with ``x_i = word[i mod p]``.
Points are stored in least-period form, so two points compare equal exactly
when they are equal as sequences. The group acts by ``(g x)_i = x_{i+g}``.

The metric is ``d(x, y) = 2^-k`` with ``k = min{|i| : x_i != y_i}``; its
values are dyadic rationals and are returned as :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InvalidArgument
from .group import FiniteSubset, as_subset


def _least_period(word: tuple[int, ...]) -> int:
    p = len(word)
    for d in range(1, p + 1):
        if p % d == 0 and word == word[:d] * (p // d):
            return d
    return p


@dataclass(frozen=True)
class PeriodicPoint:
    word: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(a) for a in self.word)
        if not w:
            raise InvalidArgument("a periodic point needs a nonempty word")
        object.__setattr__(self, "word", w[: _least_period(w)])

    @classmethod
    def of(cls, word) -> "PeriodicPoint":
        """Build from a digit string like ``"0110"`` or any int sequence."""
        if isinstance(word, str):
            return cls(tuple(int(c) for c in word))
        return cls(tuple(word))

    @property
    def period(self) -> int:
        return len(self.word)

    def __getitem__(self, i: int) -> int:
        return self.word[i % len(self.word)]

    def window(self, positions: Iterable[int]) -> tuple[int, ...]:
        w, p = self.word, len(self.word)
        return tuple(w[i % p] for i in positions)

    def expanded(self, period: int) -> tuple[int, ...]:
        """The word repeated to length ``period`` (a multiple of the period)."""
        if period % self.period:
            raise InvalidArgument(f"{period} is not a multiple of the period {self.period}")
        return self.word * (period // self.period)

    def sort_key(self):
        return (len(self.word), self.word)

    def __lt__(self, other: "PeriodicPoint"):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if all(a < 10 for a in self.word):
            return "".join(map(str, self.word))
        return ",".join(map(str, self.word))


def shift_action(g: int, x: PeriodicPoint) -> PeriodicPoint:
    """(g x)_i = x_{i+g}."""
    p = x.period
    g %= p
    return PeriodicPoint(x.word[g:] + x.word[:g])


def metric_d(x: PeriodicPoint, y: PeriodicPoint) -> Fraction:
    if x.word == y.word:
        return Fraction(0)
    L = math.lcm(x.period, y.period)
    for k in range(L + 1):
        if x[k] != y[k] or x[-k] != y[-k]:
            return Fraction(1, 2**k)
    # equal on a full common period means equal as sequences
    return Fraction(0)  # pragma: no cover


def metric_dH(H, x: PeriodicPoint, y: PeriodicPoint) -> Fraction:
    """d_H(x, y) = max over s in H of d(s x, s y)."""
    H = as_subset(H)
    if len(H) == 0:
        raise InvalidArgument("d_H needs a nonempty window")
    return max(metric_d(shift_action(s, x), shift_action(s, y)) for s in H)


def threshold_radius(eps) -> int:
    """Least k >= 0 with 2^-k <= eps.

    For the canonical metric, ``d(x, y) <= eps`` iff x and y agree on
    ``[-(k-1), k-1]`` (on nothing when k = 0).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidArgument("eps must be positive")
    k = 0
    while Fraction(1, 2**k) > eps:
        k += 1
    return k


def separation_window(H, eps) -> FiniteSubset:
    """Coordinates on which agreement is equivalent to d_H(x, y) <= eps."""
    H = as_subset(H)
    k = threshold_radius(eps)
    if k == 0:
        return FiniteSubset(())
    return H.thicken(k - 1)


@dataclass(frozen=True)
class Cylinder:
    """Points x with (x_{o})_{o in offsets} in ``words``.

    ``Cylinder((), {()})`` is the whole space. Cylinders are clopen, so a
    finite union of them is its own closure.
    """

    offsets: tuple[int, ...]
    words: frozenset

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        ws = frozenset(tuple(int(a) for a in w) for w in self.words)
        for w in ws:
            if len(w) != len(self.offsets):
                raise InvalidArgument("cylinder word length must match its offsets")
        object.__setattr__(self, "words", ws)

    @classmethod
    def whole(cls) -> "Cylinder":
        return cls((), frozenset({()}))

    @classmethod
    def at(cls, position: int, symbols: Iterable[int]) -> "Cylinder":
        """Points whose symbol at ``position`` lies in ``symbols``."""
        return cls((position,), frozenset((a,) for a in symbols))

    @classmethod
    def ball(cls, x: PeriodicPoint, radius: int) -> "Cylinder":
        """Points agreeing with x on [-radius, radius] (the d-ball of radius 2^-radius)."""
        offs = tuple(range(-radius, radius + 1))
        return cls(offs, frozenset({x.window(offs)}))

    def contains(self, x: PeriodicPoint, at: int = 0) -> bool:
        """Whether ``shift_action(at, x)`` lies in the cylinder."""
        return x.window(at + o for o in self.offsets) in self.words

    def __contains__(self, x: PeriodicPoint) -> bool:
        return self.contains(x)

    def is_disjoint(self, other: "Cylinder") -> bool:
        common = sorted(set(self.offsets) & set(other.offsets))
        ia = [self.offsets.index(o) for o in common]
        ib = [other.offsets.index(o) for o in common]
        left = {tuple(w[i] for i in ia) for w in self.words}
        right = {tuple(w[i] for i in ib) for w in other.words}
        return not (left & right)

    def distance_lower_bound(self, other: "Cylinder") -> Fraction:
        """min d(u, v) over u in self, v in other, for the full shift.

        Inside a subshift the true distance can only be larger.
        """
        best = None
        for u in self.words:
            for v in other.words:
                du = dict(zip(self.offsets, u))
                dv = dict(zip(other.offsets, v))
                diffs = [abs(o) for o in du if o in dv and du[o] != dv[o]]
                if not diffs:
                    return Fraction(0)
                val = Fraction(1, 2 ** min(diffs))
                best = val if best is None else min(best, val)
        return best if best is not None else Fraction(0)


@dataclass(frozen=True)
class SymbolicSystem:
    alphabet: int
    forbidden: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.alphabet < 1:
            raise InvalidArgument("alphabet size must be >= 1")
        fw = []
        for w in self.forbidden:
            w = tuple(int(c) for c in w)
            if not w:
                raise InvalidArgument("empty forbidden word")
            if any(not 0 <= a < self.alphabet for a in w):
                raise InvalidArgument(f"forbidden word {w} uses symbols outside the alphabet")
            fw.append(w)
        object.__setattr__(self, "forbidden", tuple(sorted(set(fw))))

    @property
    def max_forbidden(self) -> int:
        return max((len(w) for w in self.forbidden), default=0)

    def contains(self, x: PeriodicPoint) -> bool:
        if any(not 0 <= a < self.alphabet for a in x.word):
            return False
        if not self.forbidden:
            return True
        # every occurrence of a forbidden word starts at some i in [0, p)
        for w in self.forbidden:
            for i in range(x.period):
                if x.window(range(i, i + len(w))) == w:
                    return False
        return True

    def __contains__(self, x: PeriodicPoint) -> bool:
        return self.contains(x)

    def words(self, period: int) -> list[tuple[int, ...]]:
        """All length-``period`` words whose periodic extension lies in the system."""
        out = []
        forb = set(self.forbidden)
        lens = sorted({len(w) for w in forb})

        def ok_suffix(buf):
            n = len(buf)
            for ln in lens:
                if ln <= n and tuple(buf[n - ln :]) in forb:
                    return False
            return True

        buf: list[int] = []

        def rec():
            if len(buf) == period:
                if self.contains(PeriodicPoint(tuple(buf))):
                    out.append(tuple(buf))
                return
            for a in range(self.alphabet):
                buf.append(a)
                if ok_suffix(buf):
                    rec()
                buf.pop()

        rec()
        return out

    def points(self, period: int) -> list[PeriodicPoint]:
        """All points whose period divides ``period``, sorted."""
        return sorted({PeriodicPoint(w) for w in self.words(period)})


def full_shift(k: int) -> SymbolicSystem:
    return SymbolicSystem(k)


@dataclass(frozen=True)
class SlidingBlockCode:
    source: SymbolicSystem
    target: SymbolicSystem
    radius: int
    table: Mapping[tuple[int, ...], int] = field(hash=False)
    name: str = "table"

    def __post_init__(self):
        if self.radius < 0:
            raise InvalidArgument("radius must be nonnegative")
        width = 2 * self.radius + 1
        tab = {}
        for w in itertools.product(range(self.source.alphabet), repeat=width):
            if w not in self.table:
                raise InvalidArgument(f"rule undefined on block {w}")
            b = int(self.table[w])
            if not 0 <= b < self.target.alphabet:
                raise InvalidArgument(f"rule maps {w} to {b}, outside the target alphabet")
            tab[w] = b
        object.__setattr__(self, "table", tab)

    @classmethod
    def from_rule(cls, source, target, radius, rule: Callable[[tuple], int], name="rule"):
        width = 2 * radius + 1
        table = {w: rule(w) for w in itertools.product(range(source.alphabet), repeat=width)}
        return cls(source, target, radius, table, name)

    def image_symbol(self, x: PeriodicPoint, i: int) -> int:
        w = self.radius
        return self.table[x.window(range(i - w, i + w + 1))]

    def validate(self, max_period: int = 6) -> None:
        """Check that the code maps source points into the target, up to a period."""
        for p in range(1, max_period + 1):
            for x in self.source.points(p):
                y = apply_factor(self, x)
                if y not in self.target:
                    raise InvalidArgument(f"code maps {x} outside the target system")


def apply_factor(code: SlidingBlockCode, x: PeriodicPoint) -> PeriodicPoint:
    """y_i = rule(x_{i-w} .. x_{i+w})."""
    if x not in code.source:
        raise InvalidArgument(f"{x} is not a point of the source system")
    return PeriodicPoint(tuple(code.image_symbol(x, i) for i in range(x.period)))


def fiber_points(code: SlidingBlockCode, y: PeriodicPoint, period: int) -> list[PeriodicPoint]:
    """Every source point of period dividing ``period`` that maps to y (sorted).

    Depth-first over positions 0..period-1; a non-wrapping image constraint
    is checked as soon as its block is assigned, wrap-around blocks and
    forbidden words at the end.
    """
    if period < 1 or period % y.period:
        raise InvalidArgument(f"period {period} is not a multiple of the period of y")
    target = y.expanded(period)
    w = code.radius
    width = 2 * w + 1
    alph = code.source.alphabet
    forb = set(code.source.forbidden)
    lens = sorted({len(f) for f in forb})
    table = code.table
    buf: list[int] = []
    found = set()

    def rec(j):
        if j == period:
            x = PeriodicPoint(tuple(buf))
            for i in itertools.chain(range(w), range(max(w, period - w), period)):
                if code.image_symbol(x, i) != target[i]:
                    return
            if forb and not code.source.contains(x):
                return
            found.add(x)
            return
        for a in range(alph):
            buf.append(a)
            good = True
            if j >= width - 1:
                if table[tuple(buf[j - width + 1 :])] != target[j - w]:
                    good = False
            if good and forb:
                for ln in lens:
                    if ln <= j + 1 and tuple(buf[j + 1 - ln :]) in forb:
                        good = False
                        break
            if good:
                rec(j + 1)
            buf.pop()

    rec(0)
    return sorted(found)


# -- standard systems used throughout the tests and the CLI ------------------


def identity_code(system: SymbolicSystem) -> SlidingBlockCode:
    return SlidingBlockCode.from_rule(system, system, 0, lambda b: b[0], "identity")


def projection_code(k1: int = 2, k2: int = 2) -> SlidingBlockCode:
    """({0..k1-1} x {0..k2-1})^Z -> {0..k1-1}^Z, keeping the first coordinate.

    The product symbol (a, b) is encoded as ``a * k2 + b``.
    """
    return SlidingBlockCode.from_rule(
        full_shift(k1 * k2), full_shift(k1), 0, lambda b: b[0] // k2, "projection"
    )


def point_code(system: SymbolicSystem) -> SlidingBlockCode:
    """The factor map onto the one-point system."""
    return SlidingBlockCode.from_rule(system, full_shift(1), 0, lambda b: 0, "constant")


def xor_code() -> SlidingBlockCode:
    """y_i = x_i xor x_{i+1} on the full 2-shift (radius 1)."""
    return SlidingBlockCode.from_rule(full_shift(2), full_shift(2), 1, lambda b: b[1] ^ b[2], "xor")


def two_fixed_points() -> SymbolicSystem:
    """The subshift {0^inf, 1^inf}."""
    return SymbolicSystem(2, ((0, 1), (1, 0)))


def second_coordinate_cylinder(value: int, k2: int = 2, k1: int = 2, position: int = 0) -> Cylinder:
    """Product-alphabet points whose second coordinate at ``position`` is ``value``."""
    return Cylinder.at(position, [a * k2 + value for a in range(k1)])


def word_str(word: Sequence[int]) -> str:
    return "".join(map(str, word)) if all(a < 10 for a in word) else ",".join(map(str, word))
