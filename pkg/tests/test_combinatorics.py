import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from relmdim.combinatorics import (
    IndExtractConfig,
    PatternFamily,
    balanced_patterns,
    entropy_function,
    extract_base_independence,
    ind_extract,
    ind_oracle,
    is_valid_extraction,
    sauer_shelah_bound,
    shatter_extract,
)
from relmdim.errors import InvalidArgument, StructureError
from relmdim.instances import projection_measure_data, random_family, random_ind_instance
from relmdim.symbolic import PeriodicPoint, apply_factor, full_shift, point_code, projection_code, second_coordinate_cylinder


def test_entropy_function():
    assert entropy_function(Fraction(1, 2)) == pytest.approx(0.5 * math.log(2))
    assert entropy_function(Fraction(999999, 1000000)) < 1e-4
    f = entropy_function
    assert f(0.6 - 0.05) + f(1 - 0.05) > f(0.6)


@pytest.mark.parametrize("n", range(2, 13, 2))
def test_balanced_pattern_count(n):
    assert len(balanced_patterns(range(n))) == math.comb(n, n // 2)


def test_balanced_patterns_small():
    assert sorted(balanced_patterns([0, 1]).patterns) == [(1, 2), (2, 1)]
    assert len(balanced_patterns(range(4))) == 6
    with pytest.raises(InvalidArgument):
        balanced_patterns([])


def test_shatter_examples():
    cube = PatternFamily(tuple(range(4)), frozenset(itertools.product((1, 2), repeat=4)))
    for mode in ("exact", "greedy"):
        assert shatter_extract(cube, mode).I == tuple(range(4))
        single = PatternFamily(tuple(range(4)), frozenset({(1, 1, 2, 2)}))
        assert shatter_extract(single, mode).I == ()


@given(st.integers(0, 2 ** 32), st.integers(2, 8))
def test_greedy_never_beats_exact(seed, width):
    rng = random.Random(seed)
    fam = random_family(width, rng.randint(1, 2 ** width), rng)
    ex, gr = shatter_extract(fam, "exact"), shatter_extract(fam, "greedy")
    assert len(gr.I) <= len(ex.I)
    assert ex.validate(fam) and gr.validate(fam)
    assert fam.shatters(ex.I)
    assert len(fam) <= sauer_shelah_bound(width, len(ex.I))


def test_shatter_at_sauer_shelah_scale():
    rng = random.Random(10)
    fam = random_family(10, round(2 ** 8), rng)
    k = len(shatter_extract(fam, "exact").I)
    assert sauer_shelah_bound(10, k) >= len(fam)


def test_config_ranges():
    IndExtractConfig(Fraction(1, 2), Fraction(3, 5))
    with pytest.raises(InvalidArgument):
        IndExtractConfig(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(InvalidArgument):
        IndExtractConfig(0, Fraction(3, 5))
    cfg = IndExtractConfig.admissible(Fraction(1, 2), Fraction(51, 100))
    assert cfg.rate() > cfg.theta1


def test_extract_maximal_hypothesis():
    E = tuple(range(6))
    fam = balanced_patterns(E)
    subsets = {s: frozenset(E) for s in fam.patterns}
    cert = ind_extract(E, fam, subsets, IndExtractConfig(Fraction(1, 2), Fraction(3, 5)))
    assert cert.I and cert.validate(fam, subsets)


def test_extract_rejects_thin_subsets():
    E = tuple(range(6))
    fam = balanced_patterns(E)
    subsets = {s: frozenset(E[:3]) for s in fam.patterns}
    with pytest.raises(InvalidArgument):
        ind_extract(E, fam, subsets, IndExtractConfig(Fraction(1, 2), Fraction(3, 5)))


@given(st.integers(0, 2 ** 32), st.sampled_from([4, 6, 8]))
def test_extraction_revalidates_and_respects_oracle(seed, N):
    rng = random.Random(seed)
    d, tau = Fraction(1, 2), Fraction(3, 5)
    E, fam, subsets = random_ind_instance(N, d, tau, rng)
    cert = ind_extract(E, fam, subsets, IndExtractConfig.admissible(d, tau))
    assert cert.validate(fam, subsets)
    assert is_valid_extraction(cert.I, fam, subsets)
    assert len(cert.I) <= ind_oracle(E, fam, subsets).size
    assert cert.status == ("ok" if cert.I else "extraction-failed")


def test_oracle_rejects_empty_family():
    with pytest.raises(InvalidArgument):
        ind_oracle(range(4), PatternFamily(tuple(range(4)), frozenset()), {})


def test_base_independence_on_projection():
    code = projection_code()
    E = tuple(range(6))
    atoms = projection_measure_data(E, 2, 6, random.Random(3))
    A1, A2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    res = extract_base_independence(code, A1, A2, Fraction(2, 3), Fraction(2, 3), atoms, E, period=6)
    assert len(res.I) >= 1
    assert res.certificate.validate(code)


def test_base_independence_single_atom_trace():
    # L = 1: every Psi value is 2, every W_sigma is the single index
    code = projection_code()
    E = tuple(range(4))
    atoms = projection_measure_data(E, 1, 4, random.Random(1))
    A1, A2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    res = extract_base_independence(code, A1, A2, Fraction(3, 4), Fraction(3, 4), atoms, E)
    assert res.transcript["i_E"] == 0
    assert res.extraction.validate(
        PatternFamily(E, frozenset(atoms)), {s: frozenset(E) for s in atoms}
    )


def test_base_independence_rejections():
    code = projection_code()
    E = tuple(range(4))
    atoms = projection_measure_data(E, 1, 4)
    A1, A2 = second_coordinate_cylinder(0), second_coordinate_cylinder(1)
    with pytest.raises(InvalidArgument):
        extract_base_independence(code, A1, A2, Fraction(1, 2), Fraction(1, 2), atoms, E)
    bad = dict(atoms)
    s = sorted(bad)[0]
    x = bad[s][0]
    other = next(p for p in full_shift(4).points(4) if apply_factor(code, p) != apply_factor(code, x))
    bad[s] = [other]
    with pytest.raises(StructureError) as exc:
        extract_base_independence(code, A1, A2, Fraction(3, 4), Fraction(3, 4), bad, E)
    assert exc.value.kind == "fiber-mismatch"
    with pytest.raises(StructureError) as exc:
        extract_base_independence(code, A1, A2, Fraction(3, 4), Fraction(3, 4), atoms, (0, 1, 2))
    assert exc.value.kind == "balance-violation"
