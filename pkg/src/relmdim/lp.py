"""Exact solvers for the two small linear programs behind Wasserstein-1.

* :func:`min_cost_transport` solves the transportation problem by successive
  shortest augmenting paths (Bellman-Ford on the residual graph).
* :func:`simplex_max` is a dense tableau simplex with Bland's rule.

Both work over Python ints and :class:`~fractions.Fraction`, so results are
exact. Neither is meant for more than a few dozen variables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InvalidArgument


def min_cost_transport(supply: Sequence, demand: Sequence, cost: Sequence[Sequence]):
    """Return ``(value, plan)`` for min sum cost[i][j] * plan[i][j].

    ``supply`` and ``demand`` must have equal totals; ``cost`` must be
    nonnegative (a metric), so the residual graph never has a negative cycle.
    """
    m, n = len(supply), len(demand)
    supply = [Fraction(a) for a in supply]
    demand = [Fraction(b) for b in demand]
    if sum(supply) != sum(demand):
        raise InvalidArgument("supply and demand totals differ")
    rem_s = list(supply)
    rem_d = list(demand)
    flow = [[Fraction(0)] * n for _ in range(m)]
    cost = [[Fraction(c) for c in row] for row in cost]

    while any(rem_s):
        # Bellman-Ford over sources 0..m-1 and sinks m..m+n-1
        INF = None
        dist = [Fraction(0) if rem_s[i] > 0 else INF for i in range(m)] + [INF] * n
        pred: list = [None] * (m + n)
        for _ in range(m + n):
            changed = False
            for i in range(m):
                di = dist[i]
                if di is None:
                    continue
                for j in range(n):
                    nd = di + cost[i][j]
                    if dist[m + j] is None or nd < dist[m + j]:
                        dist[m + j] = nd
                        pred[m + j] = i
                        changed = True
            for j in range(n):
                dj = dist[m + j]
                if dj is None:
                    continue
                for i in range(m):
                    if flow[i][j] > 0:
                        nd = dj - cost[i][j]
                        if dist[i] is None or nd < dist[i]:
                            dist[i] = nd
                            pred[i] = m + j
                            changed = True
            if not changed:
                break
        sinks = [j for j in range(n) if rem_d[j] > 0 and dist[m + j] is not None]
        j_end = min(sinks, key=lambda j: (dist[m + j], j))
        path = []
        node = m + j_end
        while True:
            path.append(node)
            if node < m and pred[node] is None:
                break
            node = pred[node]
        path.reverse()  # source, sink, source, sink, ..., sink
        amount = min(rem_s[path[0]], rem_d[j_end])
        for a, b in zip(path, path[1:]):
            if a >= m:  # sink -> source step cancels flow
                amount = min(amount, flow[b][a - m])
        for a, b in zip(path, path[1:]):
            if a < m:
                flow[a][b - m] += amount
            else:
                flow[b][a - m] -= amount
        rem_s[path[0]] -= amount
        rem_d[j_end] -= amount

    value = sum(cost[i][j] * flow[i][j] for i in range(m) for j in range(n))
    return Fraction(value), flow


def simplex_max(c: Sequence, A: Sequence[Sequence], b: Sequence):
    """Maximize c.x subject to A x <= b, x >= 0, for b >= 0.

    Returns ``(value, x)``. Uses Bland's rule, so it cannot cycle. With
    integer data and a totally unimodular ``A`` every pivot element is 1 and
    the tableau stays in Python ints.
    """
    m, n = len(A), len(c)
    if any(bi < 0 for bi in b):
        raise InvalidArgument("simplex_max needs b >= 0 (origin feasible)")
    T = []
    for i in range(m):
        row = list(A[i]) + [0] * m + [b[i]]
        row[n + i] = 1
        T.append(row)
    z = [-cj for cj in c] + [0] * m + [0]
    basis = [n + i for i in range(m)]
    width = n + m + 1

    while True:
        enter = next((j for j in range(n + m) if z[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] if a == 1 else Fraction(T[i][-1]) / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise InvalidArgument("LP is unbounded")
        r = best[1]
        piv = T[r][enter]
        if piv != 1:
            T[r] = [Fraction(v) / piv for v in T[r]]
        prow = T[r]
        nz = [k for k in range(width) if prow[k] != 0]
        for i in range(m):
            if i == r:
                continue
            f = T[i][enter]
            if f != 0:
                row = T[i]
                for k in nz:
                    row[k] -= f * prow[k]
        f = z[enter]
        for k in nz:
            z[k] -= f * prow[k]
        basis[r] = enter

    x = [0] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return z[-1], x
