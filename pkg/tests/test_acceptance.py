"""Acceptance battery: one PASS/FAIL line per criterion, at the stated tolerances and time limits."""

import math
import random
import time
from fractions import Fraction

import pytest

from relmdim.cli import run
from relmdim.combinatorics import (
    IndExtractConfig,
    ind_extract,
    ind_oracle,
    is_valid_extraction,
    sauer_shelah_bound,
    shatter_extract,
)
from relmdim.entropy import independence_density, relative_entropy_estimate
from relmdim.group import FiniteSubset, folner_defect, folner_window
from relmdim.instances import (
    random_face,
    random_family,
    random_ind_instance,
    random_measure,
    random_product_point,
    random_psi_structure,
)
from relmdim.meandim import blocks_disjoint, claim1_decompose, claim2_bounds, mdim_lower_certificate
from relmdim.serialize import dumps
from relmdim.simplex import lebesgue_ord_oracle
from relmdim.symbolic import (
    Cylinder,
    PeriodicPoint,
    apply_factor,
    fiber_points,
    full_shift,
    identity_code,
    metric_d,
    metric_dH,
    point_code,
    projection_code,
    shift_action,
    two_fixed_points,
    xor_code,
)
from relmdim.transport import kantorovich_dual, wasserstein1

from pathlib import Path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail, seconds, limit):
        ok = ok and seconds < limit
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail} ({seconds:.2f}s < {limit}s)")
        return ok
    return emit


def test_c01_transport_duality(verdict):
    t0 = time.perf_counter()
    rng = random.Random(101)
    bad = []
    for k in range(200):
        mu = random_measure(rng, rng.randint(1, 6), rng.randint(1, 4))
        nu = random_measure(rng, rng.randint(1, 6), rng.randint(1, 4))
        if wasserstein1(mu, nu)[0] != kantorovich_dual(mu, nu)[0]:
            bad.append(k)
    assert verdict(1, not bad, f"primal = dual on 200 instances, mismatches {bad}", time.perf_counter() - t0, 10)


def test_c02_entropy_closed_form(verdict):
    t0 = time.perf_counter()
    est = relative_entropy_estimate(projection_code(), [2, 4, 6, 8], Fraction(3, 5), 8)
    counts = [r.count for r in est.rows]
    ok = counts == [2 ** n for n in (2, 4, 6, 8)] and all(r.exact for r in est.rows)
    ok = ok and all(math.log(r.count) / r.n == pytest.approx(math.log(2), abs=1e-15) for r in est.rows)
    assert verdict(2, ok, f"separated counts {counts} = 2^n, value log 2", time.perf_counter() - t0, 60)


def test_c03_identity_factor(verdict):
    t0 = time.perf_counter()
    est = relative_entropy_estimate(identity_code(full_shift(2)), [2, 4, 6, 8], Fraction(3, 5), 8)
    zeros = all(r.value == 0 for r in est.rows)
    H = folner_window(8)
    code = point_code(two_fixed_points())
    V1, V2 = Cylinder.ball(PeriodicPoint.of("0"), 1), Cylinder.ball(PeriodicPoint.of("1"), 1)
    assert V1.is_disjoint(V2)
    dens = independence_density(V1, V2, code, H, 8)
    ok = zeros and dens.ratio <= Fraction(1, len(H))
    assert verdict(3, ok, f"identity table zero, two-point density {dens.ratio} <= 1/8", time.perf_counter() - t0, 10)


def test_c04_ind_certification(verdict):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    d, tau = Fraction(1, 2), Fraction(3, 5)
    cfg = IndExtractConfig(d, tau)
    bad, big = [], 0
    for k in range(100):
        E, fam, subsets = random_ind_instance(6, d, tau, rng)
        assert len(fam) > d * 20 and all(len(s) > tau * 6 for s in subsets.values())
        cert = ind_extract(E, fam, subsets, cfg)
        if not (cert.validate(fam, subsets) and is_valid_extraction(cert.I, fam, subsets)
                and len(cert.I) <= ind_oracle(E, fam, subsets).size):
            bad.append(k)
        big += len(cert.I) >= 2
    ok = not bad and big >= 1
    assert verdict(4, ok, f"100 certificates re-validate, {big} with |I| >= 2, failures {bad}",
                   time.perf_counter() - t0, 300)


def test_c05_shatter_agreement(verdict):
    t0 = time.perf_counter()
    rng = random.Random(505)
    bad = []
    for k in range(50):
        fam = random_family(10, rng.randint(2, 1024), rng)
        ex, gr = shatter_extract(fam, "exact"), shatter_extract(fam, "greedy")
        if not (len(gr.I) <= len(ex.I) and len(fam) <= sauer_shelah_bound(10, len(ex.I)) and ex.validate(fam)):
            bad.append(k)
    assert verdict(5, not bad, f"greedy <= exact and Sauer-Shelah on 50 families, failures {bad}",
                   time.perf_counter() - t0, 300)


def test_c06_claims_exactness(verdict):
    t0 = time.perf_counter()
    rng = random.Random(606)
    count = 0
    for _ in range(100):
        H, m = rng.choice([1, 2]), rng.choice([1, 2])
        s = random_psi_structure(rng, H, m)
        t = random_product_point(rng, 2 ** H, m)
        F = random_face(rng, 2 ** H)
        i = rng.randrange(m)
        dec = claim1_decompose(s, t, F, i)  # raises on any atom mismatch
        res = claim2_bounds(s, t, F, i)  # raises on any sandwich violation
        assert dec.b1 + dec.b2 == 1 and res.lower <= res.upper
        count += 1
    assert verdict(6, count == 100, "decomposition and sandwich exact on 100 structures",
                   time.perf_counter() - t0, 120)


def test_c07_formula_reproduction(verdict):
    t0 = time.perf_counter()
    code = point_code(full_shift(2))
    V1, V2 = Cylinder.at(0, [0]), Cylinder.at(0, [1])
    bounds = []
    ok = True
    for H, size in ((4, 256), (6, 384), (8, 640)):
        c = mdim_lower_certificate(code, V1, V2, 1, H, folner_window(size), seed=7)
        ok = ok and c.validate() and c.m >= c.r * c.T / 2 and blocks_disjoint(c.candidate_blocks)
        ok = ok and c.bound == Fraction(1, 4 ** 4 * H * H) * 2 ** H * size
        bounds.append(c.bound)
    ok = ok and bounds[0] == 1 == Fraction(1, 4 ** 4 * 16) * 16 * 256
    ok = ok and all(a < b for a, b in zip(bounds, bounds[1:]))
    assert verdict(7, ok, f"bounds {[str(b) for b in bounds]} for H = 4, 6, 8", time.perf_counter() - t0, 300)


def test_c08_lebesgue_oracle(verdict):
    t0 = time.perf_counter()
    rep = lebesgue_ord_oracle(2, 1, 10)
    ex = rep.exhaustive
    ok = rep.min_ord_found == 1 and ex["complete"] and 0 not in ex["ords_found"]
    text = rep.to_dict()["relation"]
    ok = ok and "n*k = 2" in text and "(n-1)*k = 1" in text
    assert verdict(8, ok, f"least ord {rep.min_ord_found}, two-element ords {ex['ords_found']}; {text}",
                   time.perf_counter() - t0, 300)


def test_c09_symbolic_batteries(verdict):
    t0 = time.perf_counter()
    failures = 0
    for g in range(-4, 5):
        for n in range(1, 65):
            failures += folner_defect(folner_window(n), g) != Fraction(2 * min(abs(g), n), n)
    for code in (identity_code(full_shift(2)), projection_code(), xor_code()):
        for p in range(1, 7):
            for x in code.source.points(p):
                y = apply_factor(code, x)
                failures += sum(apply_factor(code, shift_action(g, x)) != shift_action(g, y) for g in range(-8, 9))
    pts = full_shift(2).points(3)
    for x in pts:
        for y in pts:
            failures += metric_d(x, y) != metric_d(y, x)
            for z in pts:
                failures += metric_d(x, z) > metric_d(x, y) + metric_d(y, z)
    windows = [FiniteSubset(range(a, b)) for a in range(-3, 3) for b in range(a + 1, 4)]
    for x in pts:
        for y in pts:
            for E in windows:
                for Hs in windows:
                    failures += metric_dH(E.union(Hs), x, y) != max(metric_dH(E, x, y), metric_dH(Hs, x, y))
    code = xor_code()
    for n in range(1, 9):
        src = full_shift(2).points(n)
        for y in code.target.points(n):
            failures += fiber_points(code, y, n) != sorted(x for x in src if apply_factor(code, x) == y)
    assert verdict(9, failures == 0, f"equivariance, metric, d_H union, Folner and fiber checks: {failures} failures",
                   time.perf_counter() - t0, 30)


def test_c10_determinism(verdict):
    t0 = time.perf_counter()
    commands = [
        ["entropy", "--config", str(CONFIGS / "entropy_projection.json")],
        ["mdim-lower", "--config", str(CONFIGS / "mdim_full_shift.json")],
        ["transport", "--config", str(CONFIGS / "transport_pair.json")],
        ["verify-lemmas", "--config", str(CONFIGS / "verify_lemmas.json")],
    ]
    same = []
    for argv in commands:
        blocks = []
        for _ in range(2):
            code, report, _ = run(argv + ["--seed", "11", "--out", "/dev/null"])
            assert code == 0
            report.pop("timings")
            blocks.append(dumps(report))
        same.append(blocks[0] == blocks[1])
    assert verdict(10, all(same), f"byte-identical result blocks per command: {same}", time.perf_counter() - t0, 600)
