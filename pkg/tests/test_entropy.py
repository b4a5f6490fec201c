import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from relmdim.entropy import (
    conflict_graph,
    independence_density,
    is_independence_set,
    max_separated,
    maximum_independent_set,
    relative_entropy_estimate,
)
from relmdim.errors import ResourceLimit
from relmdim.group import FiniteSubset, folner_window
from relmdim.symbolic import (
    Cylinder,
    PeriodicPoint,
    full_shift,
    identity_code,
    metric_dH,
    point_code,
    projection_code,
    second_coordinate_cylinder,
    two_fixed_points,
)

P = PeriodicPoint.of


def test_max_separated_examples():
    H = FiniteSubset([0])
    assert max_separated([P("0"), P("1")], Fraction(1, 2), H).cardinality == 2
    assert max_separated([P("01")], Fraction(1, 2), H).cardinality == 1
    res = max_separated(full_shift(2).points(3), Fraction(3, 5), folner_window(3))
    assert res.cardinality == 8 and res.exact


@given(st.integers(0, 2 ** 32), st.integers(1, 4), st.sampled_from([Fraction(3, 5), Fraction(1, 3), Fraction(1, 5)]))
def test_separated_witness_is_separated(seed, n, eps):
    rng = random.Random(seed)
    pool = rng.sample(full_shift(2).points(5), 12)
    H = folner_window(n)
    res = max_separated(pool, eps, H)
    for i, x in enumerate(res.witness):
        for y in res.witness[i + 1:]:
            assert metric_dH(H, x, y) > eps
    assert conflict_graph(pool, eps, H) == conflict_graph(pool, eps, H, pairwise=True)


@given(st.integers(0, 2 ** 32))
def test_separated_count_monotone(seed):
    rng = random.Random(seed)
    pool = rng.sample(full_shift(2).points(6), 16)
    counts = [[max_separated(pool, e, folner_window(n)).cardinality for n in (1, 2, 3)]
              for e in (Fraction(3, 5), Fraction(1, 3), Fraction(1, 9))]
    for row in counts:
        assert row == sorted(row)
    for col in zip(*counts):
        assert list(col) == sorted(col)


def test_mis_exact_on_small_graphs():
    cycle5 = {i: {(i + 1) % 5, (i - 1) % 5} for i in range(5)}
    idx, exact = maximum_independent_set(cycle5)
    assert len(idx) == 2 and exact


def test_entropy_projection_and_point_system():
    est = relative_entropy_estimate(projection_code(), [4], Fraction(3, 5), 4)
    assert est.rows[0].count == 16
    assert est.rows[0].value == pytest.approx(math.log(2), abs=1e-15)
    est = relative_entropy_estimate(point_code(full_shift(2)), [4], Fraction(3, 5), 4)
    assert est.rows[0].count == 16


def test_entropy_identity_zero():
    est = relative_entropy_estimate(identity_code(full_shift(2)), [2, 4, 6], [Fraction(3, 5), Fraction(3, 10)], 6)
    assert all(r.count == 1 and r.value == 0 for r in est.rows)
    assert "periodic" in est.to_dict()["note"]


def test_independence_examples():
    code = projection_code()
    U1, U2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    for J in ([0], [0, 2], [0, 1, 2, 3]):
        cert = is_independence_set(J, U1, U2, code, 4)
        assert cert is not None and cert.validate(code)
    two = point_code(two_fixed_points())
    B0, B1 = Cylinder.ball(P("0"), 1), Cylinder.ball(P("1"), 1)
    assert is_independence_set([0], B0, B1, two, 1) is not None
    for J in ([0, 1], [0, 5], [2, 3]):
        for period in (1, 2, 4):
            assert is_independence_set(J, B0, B1, two, period) is None
    W = Cylinder.whole()
    assert is_independence_set([0, 3, 5], W, W, identity_code(full_shift(2)), 3) is not None


def test_independence_density_examples():
    H = folner_window(8)
    proj = independence_density(second_coordinate_cylinder(0), second_coordinate_cylinder(1), projection_code(), H, 8)
    assert proj.ratio == 1 and proj.I == tuple(range(8))
    assert proj.certificate.validate(projection_code())
    two = point_code(two_fixed_points())
    res = independence_density(Cylinder.ball(P("0"), 1), Cylinder.ball(P("1"), 1), two, H, 8)
    assert res.ratio == Fraction(1, 8) and res.I == (0,)
    W = Cylinder.whole()
    assert independence_density(W, W, identity_code(full_shift(2)), H, 8).ratio == 1
    ident = independence_density(Cylinder.at(0, [0]), Cylinder.at(0, [1]), identity_code(full_shift(2)), H, 8)
    assert ident.ratio == 0


def test_subsets_of_certified_sets_are_independent():
    code = projection_code()
    U1, U2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    J = (0, 2, 3)
    assert is_independence_set(J, U1, U2, code, 4) is not None
    for k in range(len(J)):
        sub = J[:k] + J[k + 1:]
        assert is_independence_set(sub, U1, U2, code, 4).validate(code)


def test_entropy_and_independence_co_occur():
    proj = relative_entropy_estimate(projection_code(), [4], Fraction(3, 5), 4).rows[0].value
    ident = relative_entropy_estimate(identity_code(full_shift(2)), [4], Fraction(3, 5), 4).rows[0].value
    U1, U2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    for n in (2, 4, 6):
        assert proj > 0 and independence_density(U1, U2, projection_code(), folner_window(n), n).ratio > 0
        A, B = Cylinder.at(0, [0]), Cylinder.at(0, [1])
        assert ident == 0 and independence_density(A, B, identity_code(full_shift(2)), folner_window(n), n).ratio == 0


def test_size_limit():
    with pytest.raises(ResourceLimit):
        is_independence_set(range(17), Cylinder.whole(), Cylinder.whole(), projection_code(), 17)
