"""Constraint search for periodic lifts through a sliding block code.

The question answered here is the one behind independence sets: given a
period p and several "copies", each carrying its own cylinder constraints,
is there a single base point y such that every copy has a lift x with
pi(x) = y satisfying its constraints?

Positions 0..p-1 are scanned left to right. For every copy we keep the set
of feasible assignments restricted to the positions that are still needed
by some unchecked constraint (the live positions), so the per-copy state
stays tiny. The base symbols y_i are chosen by depth-first search at the
moment the image constraint for position i becomes checkable; a branch dies
as soon as one copy has no feasible state left.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidArgument, ResourceLimit
from .symbolic import Cylinder, SlidingBlockCode


@dataclass
class _Step:
    ext_index: dict
    keep: tuple[int, ...]
    forbid: list
    factor: list


class _Plan:
    def __init__(self, code: SlidingBlockCode, period: int, copies: Sequence[Sequence[tuple[int, Cylinder]]]):
        if period < 1:
            raise InvalidArgument("period must be positive")
        self.code = code
        self.period = p = period
        w = code.radius
        cons_positions = []

        forbid = []
        for f in code.source.forbidden:
            for i in range(p):
                pos = tuple((i + t) % p for t in range(len(f)))
                forbid.append((pos, f))
                cons_positions.append(pos)
        factor = []
        for i in range(p):
            pos = tuple((i - w + t) % p for t in range(2 * w + 1))
            factor.append((pos, i))
            cons_positions.append(pos)
        copy_cons = []
        for cons in copies:
            lst = []
            for h, U in cons:
                pos = tuple((h + o) % p for o in U.offsets)
                lst.append((pos, U.words))
                cons_positions.append(pos)
            copy_cons.append(lst)

        # last time each position is referenced
        last_use = [-1] * p
        for pos in cons_positions:
            t = max(pos) if pos else 0
            for q in pos:
                last_use[q] = max(last_use[q], t)

        self.steps: list[_Step] = []
        self.copy_checks: list[list[list]] = [[[] for _ in range(p)] for _ in copies]
        self.centers_at: list[list[int]] = [[] for _ in range(p)]
        live: list[int] = []
        for j in range(p):
            ext = live + [j]
            idx = {q: k for k, q in enumerate(ext)}
            st_forbid = [(tuple(idx[q] for q in pos), f) for pos, f in forbid if max(pos) == j]
            st_factor = [(tuple(idx[q] for q in pos), c) for pos, c in factor if max(pos) == j]
            self.centers_at[j] = [c for _, c in st_factor]
            for ci, lst in enumerate(copy_cons):
                for pos, words in lst:
                    t = max(pos) if pos else 0
                    if t == j:
                        self.copy_checks[ci][j].append((tuple(idx[q] for q in pos), words))
            new_live = [q for q in ext if last_use[q] > j]
            keep = tuple(idx[q] for q in new_live)
            self.steps.append(_Step(idx, keep, st_forbid, st_factor))
            live = new_live
        # whole-space constraints with no offsets
        for ci, lst in enumerate(copy_cons):
            for pos, words in lst:
                if not pos and () not in words:
                    self.copy_checks[ci][0].append(((), frozenset()))

    def advance(self, frontier, j, ci, yval, parents=None):
        step = self.steps[j]
        table = self.code.table
        checks = self.copy_checks[ci][j]
        out = set()
        for st in frontier:
            for a in range(self.code.source.alphabet):
                ext = st + (a,)
                ok = True
                for idx, f in step.forbid:
                    if tuple(ext[i] for i in idx) == f:
                        ok = False
                        break
                if ok:
                    for idx, c in step.factor:
                        if table[tuple(ext[i] for i in idx)] != yval[c]:
                            ok = False
                            break
                if ok:
                    for idx, words in checks:
                        if tuple(ext[i] for i in idx) not in words:
                            ok = False
                            break
                if ok:
                    ns = tuple(ext[i] for i in step.keep)
                    if ns not in out:
                        out.add(ns)
                        if parents is not None:
                            parents[ns] = (st, a)
        return out


def find_common_fiber(
    code: SlidingBlockCode,
    period: int,
    copies: Sequence[Sequence[tuple[int, Cylinder]]],
    budget: int = 200_000,
    y: Sequence[int] | None = None,
):
    """Search a base word y of length ``period`` over which every copy lifts.

    Each copy is a list of ``(h, U)`` meaning ``shift_action(h, x) in U``.
    Returns the base word (tuple) or ``None``. ``budget`` bounds the number
    of search nodes; exceeding it raises :class:`ResourceLimit`. Passing
    ``y`` restricts the search to that base word.
    """
    if not copies:
        copies = [[]]
    plan = _Plan(code, period, copies)
    p = period
    tgt_alph = code.target.alphabet
    fixed = None if y is None else tuple(y)
    if fixed is not None and len(fixed) != p:
        raise InvalidArgument("base word length must equal the period")
    nodes = 0
    yval: dict[int, int] = {}

    def rec(j, frontiers):
        nonlocal nodes
        if j == p:
            return True
        centers = plan.centers_at[j]
        if fixed is not None:
            choices = [tuple(fixed[c] for c in centers)]
        else:
            choices = itertools.product(range(tgt_alph), repeat=len(centers))
        for combo in choices:
            nodes += 1
            if nodes > budget:
                raise ResourceLimit(f"lift search exceeded {budget} nodes")
            for c, v in zip(centers, combo):
                yval[c] = v
            new = []
            for ci, fr in enumerate(frontiers):
                nf = plan.advance(fr, j, ci, yval)
                if not nf:
                    break
                new.append(nf)
            else:
                if rec(j + 1, new):
                    return True
        for c in centers:
            yval.pop(c, None)
        return False

    if rec(0, [{()} for _ in copies]):
        return tuple(yval[i] for i in range(p))
    return None


def solve_lift(code: SlidingBlockCode, period: int, y: Sequence[int], constraints: Sequence[tuple[int, Cylinder]]):
    """One lift word of length ``period`` over the base word ``y``, or ``None``."""
    plan = _Plan(code, period, [constraints])
    yval = dict(enumerate(y))
    frontier = {()}
    history = []
    for j in range(period):
        parents: dict = {}
        frontier = plan.advance(frontier, j, 0, yval, parents)
        if not frontier:
            return None
        history.append(parents)
    state = next(iter(frontier))
    word = [0] * period
    for j in range(period - 1, -1, -1):
        prev, a = history[j][state]
        word[j] = a
        state = prev
    return tuple(word)
