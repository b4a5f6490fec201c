import itertools

from hypothesis import given, strategies as st

from relmdim.lifts import find_common_fiber, solve_lift
from relmdim.symbolic import Cylinder, PeriodicPoint, apply_factor, projection_code, xor_code


def _brute(code, period, copies):
    src = [PeriodicPoint(w) for w in code.source.words(period)]
    for yw in itertools.product(range(code.target.alphabet), repeat=period):
        y = PeriodicPoint(yw)
        fib = [x for x in src if apply_factor(code, x) == y]
        if all(any(all(U.contains(x, at=h) for h, U in cons) for x in fib) for cons in copies):
            return True
    return False


cyl = st.builds(lambda o, s: Cylinder.at(o, s), st.integers(-2, 2), st.sets(st.integers(0, 1), min_size=1))


@given(st.lists(st.lists(st.tuples(st.integers(0, 4), cyl), max_size=3), min_size=1, max_size=3),
       st.integers(1, 5))
def test_common_fiber_agrees_with_brute_force(copies, period):
    code = xor_code()
    y = find_common_fiber(code, period, copies)
    assert (y is not None) == _brute(code, period, copies)
    if y is not None:
        for cons in copies:
            x = PeriodicPoint(solve_lift(code, period, y, cons))
            assert apply_factor(code, x) == PeriodicPoint(tuple(y))
            assert all(U.contains(x, at=h) for h, U in cons)


def test_projection_second_coordinate_is_free():
    code = projection_code()
    U1, U2 = Cylinder.at(0, [0, 2]), Cylinder.at(0, [1, 3])
    copies = [[(h, U1 if s == 1 else U2) for h, s in zip(range(4), sigma)]
              for sigma in itertools.product((1, 2), repeat=4)]
    assert find_common_fiber(code, 4, copies) is not None
