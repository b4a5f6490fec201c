import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from relmdim.errors import InvalidArgument, MathematicalFailure, StructureError
from relmdim.group import folner_window
from relmdim.instances import random_face, random_product_point, random_psi_structure
from relmdim.meandim import (
    PsiStructure,
    blocks_disjoint,
    build_psi,
    choose_M,
    claim0_select_translates,
    claim1_decompose,
    claim2_bounds,
    claim3_chain,
    mdim_lower_certificate,
)
from relmdim.simplex import Face, ProductPoint, SimplexPoint
from relmdim.symbolic import Cylinder, full_shift, identity_code, point_code
from relmdim.transport import EmpiricalMeasure, dirac

half = Fraction(1, 2)
seeds = st.integers(0, 2 ** 32)


def structure(H=1, m=1, seed=0):
    return random_psi_structure(random.Random(seed), H, m)


def test_translate_selection_examples():
    W = folner_window(8)
    assert claim0_select_translates(W, [0], 8) == list(range(8))
    g = claim0_select_translates(W, [0, 1], 2)
    assert g == [0, 2]
    assert blocks_disjoint([[0, 1], [2, 3]])
    with pytest.raises(MathematicalFailure) as exc:
        claim0_select_translates(W, [0, 1, 2], 3)
    assert exc.value.kind == "claim0-shortfall"


@given(st.integers(1, 40), st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), st.integers(1, 6))
def test_translate_blocks_disjoint_and_inside(n, h, T):
    W = folner_window(n)
    try:
        g = claim0_select_translates(W, h, T)
    except MathematicalFailure:
        return
    blocks = [[x + hj for hj in h] for x in g]
    assert len(g) == T and blocks_disjoint(blocks)
    assert all(p in W for b in blocks for p in b)


def test_psi_vertices_and_mixtures():
    s = structure(1, 1)
    psi = build_psi(s)
    (x1, x2) = (s.witnesses[((1,),)], s.witnesses[((2,),)])
    assert psi(ProductPoint((SimplexPoint.vertex(2, 1),))) == dirac(x1)
    mid = psi(ProductPoint((SimplexPoint.barycenter(2),)))
    assert mid == EmpiricalMeasure(((x1, half), (x2, half)))
    s2 = structure(1, 2)
    bary = build_psi(s2)(ProductPoint((SimplexPoint.barycenter(2),) * 2))
    assert len(bary.atoms) == 4 and set(w for _, w in bary.atoms) == {Fraction(1, 4)}


@given(seeds, st.fractions(0, 1))
def test_psi_affine_in_one_block(seed, t):
    rng = random.Random(seed)
    s = random_psi_structure(rng, 2, 2)
    psi = build_psi(s)
    base = random_product_point(rng, 4, 2)
    u, v = random_product_point(rng, 4, 1).components[0], random_product_point(rng, 4, 1).components[0]
    mixed = SimplexPoint(tuple(t * a + (1 - t) * b for a, b in zip(u.coordinates, v.coordinates)))
    at = lambda c: ProductPoint((c,) + base.components[1:])  # noqa: E731
    assert psi(at(mixed)) == psi(at(u)).mix(t, psi(at(v)))


def test_claim1_examples():
    s = structure(1, 1)
    F = Face(2, frozenset({1}))
    inside = ProductPoint((SimplexPoint.vertex(2, 1),))
    res = claim1_decompose(s, inside, F, 0)
    assert res.b1 == 1 and res.mu_face == res.mu
    split = claim1_decompose(s, ProductPoint((SimplexPoint.barycenter(2),)), F, 0)
    assert split.b1 == split.b2 == half


@given(seeds)
def test_claim1_identity_random(seed):
    rng = random.Random(seed)
    s = random_psi_structure(rng, rng.choice([1, 2]), 2)
    n = 2 ** s.H
    t, F = random_product_point(rng, n, 2), random_face(rng, n)
    res = claim1_decompose(s, t, F, rng.randrange(2))
    assert res.b1 + res.b2 == 1


def test_claim2_examples():
    s = structure(1, 1)
    F = Face(2, frozenset({1}))
    inside = claim2_bounds(s, ProductPoint((SimplexPoint.vertex(2, 1),)), F, 0)
    assert inside.lower == inside.upper == 0
    assert all(v == 0 for lbl, v in inside.samples if lbl == "decomposition")
    opposite = claim2_bounds(s, ProductPoint((SimplexPoint.vertex(2, 2),)), F, 0)
    assert opposite.lower == s.delta and opposite.upper == 1
    assert all(s.delta <= v <= 1 for _, v in opposite.samples)


@given(seeds)
def test_claim2_sandwich_random(seed):
    rng = random.Random(seed)
    s = random_psi_structure(rng, 1, 2)
    t, F = random_product_point(rng, 2, 2), random_face(rng, 2)
    res = claim2_bounds(s, t, F, rng.randrange(2))
    assert all(res.lower <= v <= 1 for _, v in res.samples)


def test_structure_rejects_bad_witnesses():
    s = structure(1, 1)
    wit = dict(s.witnesses)
    wit[((1,),)] = wit[((2,),)]
    with pytest.raises(StructureError):
        PsiStructure(s.code, s.H, s.blocks, s.translates, wit, s.V1, s.V2, s.y, s.delta, s.window)
    with pytest.raises(StructureError) as exc:
        PsiStructure(s.code, s.H, ((0,), (0,)), (0, 0), s.witnesses, s.V1, s.V2, s.y, s.delta, s.window)
    assert exc.value.kind == "block-collision"


def test_choose_M_range():
    for r in (Fraction(1), half, Fraction(1, 3)):
        for H in (1, 4, 8):
            M = choose_M(r, H)
            assert r / 4 < Fraction(H, M) < r / 2


def test_chain_is_exact():
    c = claim3_chain(Fraction(1), 4, 9, 256, 2, 1)
    assert c["bound"] == 1 and c["holds"]


@pytest.fixture(scope="module")
def full_shift_cert():
    code = point_code(full_shift(2))
    return mdim_lower_certificate(code, Cylinder.at(0, [0]), Cylinder.at(0, [1]), 1, 4, folner_window(256), seed=1)


def test_certificate_bound(full_shift_cert):
    c = full_shift_cert
    assert c.bound == Fraction(1, 4 ** 4 * 16) * 16 * 256 == 1
    assert c.validate()
    assert c.m >= c.r * c.T / 2
    assert blocks_disjoint(c.candidate_blocks)
    assert c.recompute_bound() == c.bound


def test_certificate_serializes(full_shift_cert):
    d = full_shift_cert.to_dict()
    assert d["bound"] == "1" and d["H"] == 4 and d["chain"]["holds"] is True
    assert len(d["witnesses"]) == 2 ** (4 * full_shift_cert.m_used)


def test_identity_code_has_no_certificate():
    with pytest.raises(MathematicalFailure) as exc:
        mdim_lower_certificate(identity_code(full_shift(2)), Cylinder.at(0, [0]), Cylinder.at(0, [1]), 1, 4,
                               folner_window(256))
    assert exc.value.kind == "independence-shortfall"


def test_certificate_preconditions():
    code = point_code(full_shift(2))
    with pytest.raises(InvalidArgument):
        mdim_lower_certificate(code, Cylinder.at(0, [0]), Cylinder.at(0, [0, 1]), 1, 4, folner_window(256))
    with pytest.raises(InvalidArgument):
        mdim_lower_certificate(code, Cylinder.at(0, [0]), Cylinder.at(0, [1]), 2, 4, folner_window(256))
    with pytest.raises(MathematicalFailure):
        mdim_lower_certificate(code, Cylinder.at(0, [0]), Cylinder.at(0, [1]), 1, 4, folner_window(32))
