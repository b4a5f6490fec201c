"""Seeded property batteries: each returns a JSON-ready item with pass/fail and counterexamples."""

from __future__ import annotations

import random
from fractions import Fraction

from .combinatorics import (
    IndExtractConfig,
    ind_extract,
    ind_oracle,
    is_valid_extraction,
    sauer_shelah_bound,
    shatter_extract,
)
from .errors import RelmdimError
from .group import folner_defect, folner_window
from .instances import (
    random_face,
    random_family,
    random_ind_instance,
    random_measure,
    random_product_point,
    random_psi_structure,
)
from .meandim import claim1_decompose, claim2_bounds
from .simplex import lebesgue_ord_oracle
from .symbolic import apply_factor, full_shift, metric_d, metric_dH, projection_code, shift_action, xor_code
from .transport import kantorovich_dual, wasserstein1

MAX_COUNTEREXAMPLES = 5


def _item(name, failures, details, extra=None):
    out = {
        "name": name,
        "status": "pass" if not failures else "fail",
        "details": details,
        "counterexamples": failures[:MAX_COUNTEREXAMPLES],
    }
    if extra:
        out.update(extra)
    return out


def transport_duality(seed: int, instances: int = 200, max_atoms: int = 6) -> dict:
    rng = random.Random(seed)
    failures = []
    for k in range(instances):
        mu = random_measure(rng, rng.randint(1, max_atoms), rng.randint(1, 4))
        nu = random_measure(rng, rng.randint(1, max_atoms), rng.randint(1, 4))
        primal, _ = wasserstein1(mu, nu)
        dual, _ = kantorovich_dual(mu, nu)
        if primal != dual:
            failures.append({"instance": k, "primal": str(primal), "dual": str(dual),
                             "mu": mu.to_dict(), "nu": nu.to_dict()})
    return _item("transport-duality", failures, {"instances": instances, "max_atoms": max_atoms})


def shatter_agreement(seed: int, families: int = 50, width: int = 10) -> dict:
    rng = random.Random(seed)
    failures, rows = [], []
    for k in range(families):
        size = rng.randint(2, 2 ** width // 2)
        fam = random_family(width, size, rng)
        ex = shatter_extract(fam, "exact")
        gr = shatter_extract(fam, "greedy")
        ok = (
            len(gr.I) <= len(ex.I)
            and len(fam) <= sauer_shelah_bound(width, len(ex.I))
            and ex.validate(fam)
            and gr.validate(fam)
        )
        rows.append({"family": k, "size": len(fam), "exact": len(ex.I), "greedy": len(gr.I)})
        if not ok:
            failures.append(rows[-1])
    return _item("shatter-agreement", failures, {"families": families, "width": width}, {"table": rows})


def ind_certification(seed: int, instances: int = 100, N: int = 6, d=Fraction(1, 2), tau=Fraction(3, 5)) -> dict:
    rng = random.Random(seed)
    cfg = IndExtractConfig(d, tau)
    failures, rows = [], []
    big = 0
    for k in range(instances):
        E, fam, subsets = random_ind_instance(N, d, tau, rng)
        cert = ind_extract(E, fam, subsets, cfg)
        oracle = ind_oracle(E, fam, subsets)
        ok = cert.validate(fam, subsets) and is_valid_extraction(cert.I, fam, subsets) and len(cert.I) <= oracle.size
        big += len(cert.I) >= 2
        rows.append({"instance": k, "seed": seed, "N": N, "d": str(d), "tau": str(tau),
                     "extracted": len(cert.I), "oracle_max": oracle.size, "window": cert.window_size})
        if not ok:
            failures.append(rows[-1])
    if big == 0:
        failures.append({"reason": "no instance produced |I| >= 2"})
    return _item("ind-certification", failures, {"instances": instances, "N": N, "with_I_at_least_2": big},
                 {"table": rows})


def lebesgue_probe(seed: int, n: int = 2, k: int = 1, q: int = 10, budget: int = 2_000_000) -> dict:
    rep = lebesgue_ord_oracle(n, k, q, budget=budget, seed=seed)
    failures = []
    if (n, k) == (2, 1):
        ex = rep.exhaustive
        if not ex.get("complete"):
            failures.append({"reason": "two-element search incomplete"})
        elif 0 in ex.get("ords_found", []):
            failures.append({"reason": "found a cover with ord 0"})
        if rep.min_ord_found != 1:
            failures.append({"reason": f"least ord found is {rep.min_ord_found}, expected 1"})
    return _item("lebesgue-oracle", failures, rep.to_dict())


def claims_exactness(seed: int, structures: int = 100) -> dict:
    rng = random.Random(seed)
    failures = []
    for k in range(structures):
        H, m = rng.choice([1, 2]), rng.choice([1, 2])
        try:
            s = random_psi_structure(rng, H, m)
            t = random_product_point(rng, 2 ** H, m)
            F = random_face(rng, 2 ** H)
            i = rng.randrange(m)
            claim1_decompose(s, t, F, i)
            claim2_bounds(s, t, F, i)
        except RelmdimError as exc:
            failures.append({"structure": k, "H": H, "m": m, "error": str(exc)})
    return _item("claims-exactness", failures, {"structures": structures})


def symbolic_invariants(seed: int) -> dict:
    failures = []
    for g in range(-4, 5):
        for n in range(1, 65):
            W = folner_window(n)
            if folner_defect(W, g) != Fraction(2 * min(abs(g), n), n):
                failures.append({"check": "folner-defect", "g": g, "n": n})
    for code in (projection_code(), xor_code()):
        for p in range(1, 6):
            for x in code.source.points(p):
                y = apply_factor(code, x)
                for g in range(-8, 9):
                    if apply_factor(code, shift_action(g, x)) != shift_action(g, y):
                        failures.append({"check": "equivariance", "code": code.name, "x": str(x), "g": g})
    pts = full_shift(2).points(3)
    for x in pts:
        for y in pts:
            for z in pts:
                if metric_d(x, z) > metric_d(x, y) + metric_d(y, z):
                    failures.append({"check": "triangle", "x": str(x), "y": str(y), "z": str(z)})
    rng = random.Random(seed)
    pts4 = full_shift(2).points(4)
    for _ in range(200):
        x, y = rng.choice(pts4), rng.choice(pts4)
        E = folner_window(rng.randint(1, 4)).translate(rng.randint(-3, 3))
        Hs = folner_window(rng.randint(1, 4)).translate(rng.randint(-3, 3))
        if metric_dH(E.union(Hs), x, y) != max(metric_dH(E, x, y), metric_dH(Hs, x, y)):
            failures.append({"check": "dH-union", "x": str(x), "y": str(y)})
    return _item("symbolic-invariants", failures, {"max_g": 8, "max_period": 5})


BATTERY = {
    "transport-duality": transport_duality,
    "shatter-agreement": shatter_agreement,
    "ind-certification": ind_certification,
    "lebesgue-oracle": lebesgue_probe,
    "claims-exactness": claims_exactness,
    "symbolic-invariants": symbolic_invariants,
}
