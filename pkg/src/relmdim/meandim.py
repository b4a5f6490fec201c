"""Mean-dimension lower-bound certificates through the affine simplex embedding.

Pipeline for a factor code and two disjoint cylinders V1, V2:

1. choose M with r/4 < H/M < r/2 and translates h_j = 0..M-1;
2. pick delta so that d(z, z') <= delta forces h_j z, h_j z' to be closer
   than half the V1/V2 gap, and epsilon below delta^2 / (2 * 2^H);
3. select T translates g_l whose blocks {h_j + g_l} are disjoint in W;
4. find blocks carrying an independent H-subset, build the witnesses
   x_E for every pattern tuple, and form the embedding Psi;
5. spot-check the decomposition and distance sandwich on Psi, then check
   the numeric chain that turns m blocks into the ord lower bound.

Block indices i are 0-based; simplex vertices are numbered 1..2^H in the
lexicographic order of patterns.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .entropy import independence_density, is_independence_set, patterns
from .errors import InvalidArgument, MathematicalFailure, StructureError
from .group import FiniteSubset, as_subset, folner_window
from .symbolic import Cylinder, PeriodicPoint, SlidingBlockCode, apply_factor, metric_d, shift_action
from .simplex import Face, ProductPoint, SimplexPoint, opposite_face
from .transport import (
    EmpiricalMeasure,
    combination,
    dual_objective,
    is_one_lipschitz,
    measure_of_cylinder,
    pushforward,
    wasserstein_window,
)

ETA = Fraction(1, 16)


# -- disjoint blocks -------------------------------------------------------------------


def claim0_select_translates(W, h: Sequence[int], T: int) -> list[int]:
    """Greedy translates g_1..g_T with pairwise disjoint blocks {h_j + g} inside W.

    Each step takes the least admissible g outside the exclusion sets
    {h_j' - h_j + g_p} of earlier picks.
    """
    W = as_subset(W)
    h = list(h)
    if len(set(h)) != len(h) or not h:
        raise InvalidArgument("translates h_j must be distinct and nonempty")
    admissible = [g for g in W if all(g + hj in W for hj in h)]
    excluded: set[int] = set()
    chosen: list[int] = []
    for g in admissible:
        if len(chosen) == T:
            break
        if g in excluded:
            continue
        chosen.append(g)
        excluded.update(g - a + b for a in h for b in h)
    if len(chosen) < T:
        raise MathematicalFailure("claim0-shortfall", f"only {len(chosen)} of {T} translates fit in the window")
    return chosen


def blocks_disjoint(blocks: Sequence[Sequence[int]]) -> bool:
    seen: set[int] = set()
    for b in blocks:
        if seen & set(b):
            return False
        seen |= set(b)
    return True


# -- the embedding Psi ----------------------------------------------------------------


@dataclass
class PsiStructure:
    """Witness data behind the embedding of a product of simplices into measures.

    ``blocks[i]`` lists the H positions h_{i,j} + g_i (sorted);
    ``witnesses[E]`` for E in ([2]^H)^m is a point over ``y`` with
    ``shift_action(blocks[i][j], x) in V_{E_i(j)}``.
    """

    code: SlidingBlockCode
    H: int
    blocks: tuple[tuple[int, ...], ...]
    translates: tuple[int, ...]
    witnesses: Mapping
    V1: Cylinder
    V2: Cylinder
    y: PeriodicPoint
    delta: Fraction
    window: FiniteSubset
    _cross_min: Fraction | None = field(default=None, repr=False)

    def __post_init__(self):
        self.blocks = tuple(tuple(b) for b in self.blocks)
        self.translates = tuple(self.translates)
        self.window = as_subset(self.window)
        self.delta = Fraction(self.delta)
        self.validate()

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def vertices(self) -> list[tuple]:
        return patterns(self.H)

    def validate(self) -> None:
        if any(len(b) != self.H for b in self.blocks) or len(self.translates) != self.m:
            raise StructureError("shape", "blocks must have H positions and one translate each")
        if not blocks_disjoint(self.blocks):
            raise StructureError("block-collision", "blocks overlap")
        keys = set(itertools.product(patterns(self.H), repeat=self.m))
        if set(self.witnesses) != keys:
            raise StructureError("shape", "witnesses must be indexed by all pattern tuples")
        V = {1: self.V1, 2: self.V2}
        for E, x in self.witnesses.items():
            if apply_factor(self.code, x) != self.y:
                raise StructureError("fiber-mismatch", f"witness for {E} is not over y")
            for i, pat in enumerate(E):
                for pos, s in zip(self.blocks[i], pat):
                    if not V[s].contains(x, at=pos):
                        raise StructureError("target-membership", f"witness for {E} misses V{s} at {pos}")
        if len(set(self.witnesses.values())) != len(self.witnesses):
            raise StructureError("not-injective", "witness points must be distinct")

    def cross_separation(self) -> Fraction:
        """min d(g_i x_E, g_i x_E') over i and pairs with E_i != E'_i."""
        if self._cross_min is None:
            best = Fraction(2)
            items = sorted(self.witnesses.items())
            for i, g in enumerate(self.translates):
                shifted = [(E[i], shift_action(g, x)) for E, x in items]
                for (a, u), (b, v) in itertools.combinations(shifted, 2):
                    if a != b:
                        best = min(best, metric_d(u, v))
            self._cross_min = best
        return self._cross_min

    def certify_delta(self) -> None:
        if self.m and not self.cross_separation() > self.delta:
            raise StructureError("delta-violation", f"cross separation {self.cross_separation()} <= delta {self.delta}")

    def support_of_face(self, F: Face, i: int) -> frozenset:
        """S_{F_i}: witnesses whose i-th pattern is a vertex of F."""
        verts = self.vertices
        return frozenset(x for E, x in self.witnesses.items() if verts.index(E[i]) + 1 in F.support)


def build_psi(structure: PsiStructure):
    """Evaluator t -> sum_E prod_i t_i(E_i) delta_{x_E}, exact."""
    verts = structure.vertices
    n = len(verts)

    def psi(t) -> EmpiricalMeasure:
        comps = t.components if isinstance(t, ProductPoint) else tuple(t)
        if len(comps) != structure.m or any(c.n != n for c in comps):
            raise InvalidArgument("argument must be a point of the product of simplices")
        supports = [[(verts[k], w) for k, w in enumerate(c.coordinates) if w] for c in comps]
        atoms = []
        for combo in itertools.product(*supports):
            w = Fraction(1)
            for _, wi in combo:
                w *= wi
            atoms.append((structure.witnesses[tuple(p for p, _ in combo)], w))
        return EmpiricalMeasure(tuple(atoms))

    return psi


# -- decomposition and distance sandwich--------------------------------------------------------------


@dataclass
class Claim1Result:
    b1: Fraction
    b2: Fraction
    t_face: ProductPoint | None
    t_opposite: ProductPoint | None
    mu: EmpiricalMeasure
    mu_face: EmpiricalMeasure | None
    mu_opposite: EmpiricalMeasure | None


def claim1_decompose(structure: PsiStructure, t: ProductPoint, F: Face, i: int) -> Claim1Result:
    """Split Psi(t) as b1 * Psi(t') + b2 * Psi(t'') with t' in F_i and t'' in the opposite face.

    The identity and b1 = mu(S_{F_i}), b2 = mu(S_{opposite}) are asserted exactly.
    """
    psi = build_psi(structure)
    mu = psi(t)
    comp = t.components[i].coordinates
    inside = [k + 1 in F.support for k in range(len(comp))]
    b1 = sum((w for w, f in zip(comp, inside) if f), Fraction(0))
    b2 = 1 - b1
    S_F = structure.support_of_face(F, i)
    if measure_of_cylinder(mu, S_F) != b1:
        raise StructureError("claim1-identity", "mu(S_F) differs from b1")
    if b2 == 0:
        return Claim1Result(b1, b2, t, None, mu, mu, None)
    if b1 == 0:
        return Claim1Result(b1, b2, None, t, mu, None, mu)
    Fbar = opposite_face(F)

    def renorm(keep, b):
        c = SimplexPoint(tuple(w / b if k else Fraction(0) for w, k in zip(comp, keep)))
        return ProductPoint(t.components[:i] + (c,) + t.components[i + 1 :])

    t1 = renorm(inside, b1)
    t2 = renorm([not f for f in inside], b2)
    mu1, mu2 = psi(t1), psi(t2)
    if combination([(b1, mu1), (b2, mu2)]) != mu:
        raise StructureError("claim1-identity", "mu != b1 mu' + b2 mu''")
    if measure_of_cylinder(mu, structure.support_of_face(Fbar, i)) != b2:
        raise StructureError("claim1-identity", "mu(S_Fbar) differs from b2")
    return Claim1Result(b1, b2, t1, t2, mu, mu1, mu2)


@dataclass
class Claim2Result:
    lower: Fraction
    upper: Fraction
    samples: list  # (label, W_{G_n}(mu, sample))
    dual_values: list
    scaling_checked: bool

    def to_dict(self) -> dict:
        return {
            "lower": str(self.lower),
            "upper": str(self.upper),
            "samples": [[lbl, str(v)] for lbl, v in self.samples],
            "dual_values": [str(v) for v in self.dual_values],
            "scaling_checked": self.scaling_checked,
        }


def claim2_bounds(structure: PsiStructure, t: ProductPoint, F: Face, i: int,
                  max_vertex_samples: int = 4) -> Claim2Result:
    """Bracket W_{G_n}(Psi(t), Psi(F_i)) and check the bracket against samples.

    Lower: delta * mu(S_Fbar), certified by the test function
    x -> d(g_i x, g_i S_F). Upper: mu(S_Fbar) (the diameter is 1).
    Samples of Psi(F_i) are vertex measures and the decomposition's mu'.
    """
    structure.certify_delta()
    g = structure.translates[i]
    if g not in structure.window:
        raise InvalidArgument("block translate lies outside the window")
    dec = claim1_decompose(structure, t, F, i)
    mu = dec.mu
    b2 = dec.b2
    lower = structure.delta * b2
    upper = b2
    psi = build_psi(structure)
    S_F = structure.support_of_face(F, i)
    targets = [shift_action(g, x) for x in S_F]

    samples: list[tuple[str, EmpiricalMeasure]] = []
    if dec.mu_face is not None:
        samples.append(("decomposition", dec.mu_face))
    verts = sorted(F.support)[:max_vertex_samples]
    for v in verts:
        c = SimplexPoint.vertex(len(structure.vertices), v)
        tv = ProductPoint(t.components[:i] + (c,) + t.components[i + 1 :])
        samples.append((f"vertex-{v}", psi(tv)))

    results, duals = [], []
    g_mu = pushforward(g, mu)
    for label, nu in samples:
        dist = wasserstein_window(structure.window, mu, nu)
        g_nu = pushforward(g, nu)
        pts = set(g_mu.support) | set(g_nu.support)
        f = {x: min(metric_d(x, s) for s in targets) for x in pts}
        if not is_one_lipschitz(f):
            raise StructureError("claim2-violation", "test function is not 1-Lipschitz")
        dual = dual_objective(f, g_mu, g_nu)
        if not (lower <= dual <= dist and dist >= lower):
            raise StructureError("claim2-violation", f"lower {lower}, dual {dual}, distance {dist} for {label}")
        if b2 > 0 and not dual > lower:
            raise StructureError("claim2-violation", "strict lower bound fails")
        results.append((label, dist))
        duals.append(dual)

    scaled = False
    if dec.mu_face is not None and dec.mu_opposite is not None:
        d1 = wasserstein_window(structure.window, mu, dec.mu_face)
        d2 = wasserstein_window(structure.window, dec.mu_face, dec.mu_opposite)
        if d1 != b2 * d2 or d1 > upper:
            raise StructureError("claim2-violation", "W(mu, mu') != b2 W(mu', mu'') or exceeds the upper bound")
        scaled = True
    elif dec.mu_face is not None:
        if results and results[0][1] != 0:
            raise StructureError("claim2-violation", "mu inside the face but positive distance")
    if results and not min(v for _, v in results) >= lower:
        raise StructureError("claim2-violation", "sample below the lower bound")
    if dec.mu_face is not None and not results[0][1] <= upper:
        raise StructureError("claim2-violation", "decomposition sample above the upper bound")
    if not lower <= upper:
        raise StructureError("claim2-violation", "lower bound exceeds upper bound")
    return Claim2Result(lower, upper, results, duals, scaled)


# -- parameters --------------------------------------------------------------------------


def choose_M(r: Fraction, H: int) -> int:
    """Least M with r/4 < H/M < r/2."""
    M = math.floor(2 * H / r) + 1
    if not (r / 4 < Fraction(H, M) < r / 2):
        raise MathematicalFailure("no-M-in-range", f"no M with r/4 < {H}/M < r/2")
    return M


def cylinder_gap_exponent(V1: Cylinder, V2: Cylinder, pool: Sequence[PeriodicPoint]) -> int:
    """k with d(V1 cap pool, V2 cap pool) = 2^-k."""
    A = [x for x in pool if V1.contains(x)]
    B = [x for x in pool if V2.contains(x)]
    if not A or not B:
        raise MathematicalFailure("delta-not-found", "V1 or V2 misses the point pool")
    if set(A) & set(B):
        raise MathematicalFailure("delta-not-found", "V1 and V2 intersect on the pool")
    k = 0
    while True:
        win = range(-k, k + 1)
        if not ({x.window(win) for x in A} & {x.window(win) for x in B}):
            return k
        k += 1


def delta_holds_on_pool(K: int, h: Sequence[int], b: int, pool: Sequence[PeriodicPoint]) -> bool:
    """Whether agreement on |i| < K forces agreement on h_j + [-b, b] for all j."""
    near = range(-(K - 1), K) if K > 0 else range(0)
    far = sorted({hj + o for hj in h for o in range(-b, b + 1)})
    groups: dict[tuple, set] = {}
    for x in pool:
        groups.setdefault(x.window(near), set()).add(x.window(far))
    return all(len(v) == 1 for v in groups.values())


@dataclass
class DeltaChoice:
    delta: Fraction
    exponent: int
    pool_exponent: int
    gap_exponent: int


def choose_delta(V1: Cylinder, V2: Cylinder, h: Sequence[int], pool: Sequence[PeriodicPoint]) -> DeltaChoice:
    """delta = 2^-(max|h| + a + 2), where 2^-a bounds d(V1, V2) from below.

    The same implication is also scanned on the pool, recording the least
    dyadic exponent that already works there (``pool_exponent``).
    """
    a_analytic = 0
    lb = V1.distance_lower_bound(V2)
    if lb == 0:
        raise MathematicalFailure("delta-not-found", "V1 and V2 are not separated")
    while Fraction(1, 2 ** a_analytic) > lb:
        a_analytic += 1
    K = max(abs(x) for x in h) + a_analytic + 2
    gap = cylinder_gap_exponent(V1, V2, pool)
    b = gap + 1
    if not delta_holds_on_pool(K, h, b, pool):
        raise MathematicalFailure("delta-not-found", "analytic delta fails on the point pool")
    pool_K = next(k for k in range(K + 1) if delta_holds_on_pool(k, h, b, pool))
    return DeltaChoice(Fraction(1, 2 ** K), K, pool_K, gap)


def claim3_chain(r: Fraction, H: int, M: int, G: int, T: int, m: int, eta: Fraction = ETA) -> dict:
    """Exact evaluation of the inequality chain from m blocks to the final bound."""
    two_H = 2 ** H
    bound = r ** 3 / (4 ** 4 * H ** 2) * two_H * G
    step_m = (two_H - 1) * m
    step_T = (two_H - 1) * r * T / 2
    step_floor = (two_H - 1) * (r / 2) * ((1 - eta) * Fraction(G, M * M) - 1)
    step_quarter = two_H * (r / 4) * Fraction(G, 4 * M * M)
    step_final = two_H * (r / 4) * G / (4 * (4 * Fraction(H) / r) ** 2)
    ok = step_m >= step_T >= step_floor > step_quarter >= step_final == bound
    return {
        "ord_lower": step_m,
        "via_T": step_T,
        "via_window": step_floor,
        "quarter": step_quarter,
        "final": step_final,
        "bound": bound,
        "holds": ok,
    }


# -- the certificate --------------------------------------------------------------------


@dataclass
class MdimLowerCertificate:
    r: Fraction
    H: int
    M: int
    h: tuple[int, ...]
    delta: Fraction
    delta_pool: Fraction
    epsilon: Fraction
    eta: Fraction
    window_size: int
    T: int
    translates: tuple[int, ...]
    candidate_blocks: tuple[tuple[int, ...], ...]
    Q: tuple[int, ...]
    m: int
    m_used: int
    independent_blocks: tuple[tuple[int, ...], ...]
    density: dict
    structure: PsiStructure
    claims: list
    chain: dict
    bound: Fraction

    def recompute_bound(self) -> Fraction:
        return self.r ** 3 / (4 ** 4 * self.H ** 2) * 2 ** self.H * self.window_size

    def validate(self) -> bool:
        if self.recompute_bound() != self.bound:
            raise StructureError("bound-mismatch", "stored bound differs from the formula")
        if not blocks_disjoint(self.candidate_blocks):
            raise StructureError("block-collision", "translated blocks overlap")
        if not self.m >= self.r * self.T / 2:
            raise StructureError("independence-shortfall", "m < r T / 2")
        self.structure.validate()
        self.structure.certify_delta()
        return True

    def to_dict(self) -> dict:
        s = self.structure
        return {
            "r": str(self.r),
            "H": self.H,
            "M": self.M,
            "h": list(self.h),
            "delta": str(self.delta),
            "delta_pool": str(self.delta_pool),
            "epsilon": str(self.epsilon),
            "eta": str(self.eta),
            "window_size": self.window_size,
            "T": self.T,
            "translates": list(self.translates),
            "candidate_blocks": [list(b) for b in self.candidate_blocks],
            "Q": list(self.Q),
            "m": self.m,
            "m_used": self.m_used,
            "independent_blocks": [list(b) for b in self.independent_blocks],
            "density": self.density,
            "y": str(s.y),
            "witnesses": {
                "|".join("".join(map(str, p)) for p in E): str(x) for E, x in sorted(s.witnesses.items())
            },
            "claims": self.claims,
            "chain": {k: (v if isinstance(v, bool) else str(v)) for k, v in self.chain.items()},
            "bound": str(self.bound),
        }


def _independent_subset(block, size, V1, V2, code, period, budget):
    """First size-``size`` subset of ``block`` (greedy ascending) that is an independence set."""
    chosen: list[int] = []
    for pos in block:
        trial = chosen + [pos]
        if is_independence_set(trial, V1, V2, code, period, budget) is not None:
            chosen = trial
            if len(chosen) == size:
                return tuple(chosen)
    return None


def mdim_lower_certificate(code: SlidingBlockCode, V1: Cylinder, V2: Cylinder, r, H: int, W,
                           period: int | None = None, budget: int = 200_000, seed: int = 0,
                           spot_checks: int = 3, density_window: int = 8) -> MdimLowerCertificate:
    """Build and verify the embedding behind the lower bound r^3/(4^4 H^2) 2^H |W|."""
    r = Fraction(str(r)) if isinstance(r, float) else Fraction(r)
    if not 0 < r <= 1:
        raise InvalidArgument("r must lie in (0, 1]")
    if H < 1:
        raise InvalidArgument("H must be positive")
    W = as_subset(W)
    G = len(W)
    if not V1.is_disjoint(V2):
        raise InvalidArgument("V1 and V2 must be disjoint")

    M = choose_M(r, H)
    h = tuple(range(M))
    pool_period = max(2, min(2 * M + 2, 12))
    pool = code.source.points(pool_period)
    dc = choose_delta(V1, V2, h, pool)
    eps = dc.delta ** 2 / (2 * 2 ** H) / 2
    T = math.floor((1 - ETA) * G / (M * M))
    if T < 1:
        raise MathematicalFailure("claim0-shortfall", "window too small for a single block")

    dens = independence_density(V1, V2, code, folner_window(density_window), density_window, budget)
    if dens.ratio < r:
        raise MathematicalFailure(
            "independence-shortfall", f"independence density {dens.ratio} on [0,{density_window}) is below r = {r}"
        )
    translates = claim0_select_translates(W, h, T)
    candidate = tuple(tuple(g + hj for hj in h) for g in translates)
    if not blocks_disjoint(candidate):
        raise StructureError("block-collision", "translated blocks overlap")

    m_need = math.ceil(r * T / 2)
    span = max(max(b) for b in candidate[: max(m_need, 1)]) + 1
    per = period if period is not None else span
    Q, found = [], []
    for ell, block in enumerate(candidate):
        sub = _independent_subset(block, H, V1, V2, code, per, budget)
        if sub is not None:
            Q.append(ell)
            found.append(sub)
    m = len(Q)
    if not m >= r * T / 2:
        raise MathematicalFailure("independence-shortfall", f"only {m} blocks carry {H} independent positions")
    m_used = m_need
    used = found[:m_used]
    J = tuple(p for b in used for p in b)
    cert = is_independence_set(J, V1, V2, code, per, budget)
    if cert is None:
        raise MathematicalFailure("independence-shortfall", "chosen block positions are not jointly independent")
    witnesses = {}
    for sigma, x in cert.witnesses.items():
        E = tuple(sigma[k * H : (k + 1) * H] for k in range(m_used))
        witnesses[E] = x
    structure = PsiStructure(
        code, H, tuple(used), tuple(translates[q] for q in Q[:m_used]), witnesses, V1, V2, cert.y, dc.delta, W
    )
    structure.certify_delta()

    rng = random.Random(seed)
    n_vert = 2 ** H
    claims = []
    for _ in range(spot_checks):
        comps = []
        for _ in range(m_used):
            supp = rng.sample(range(n_vert), min(n_vert, rng.randint(1, 3)))
            raw = [rng.randint(1, 4) for _ in supp]
            coords = [Fraction(0)] * n_vert
            for k, w in zip(supp, raw):
                coords[k] = Fraction(w, sum(raw))
            comps.append(SimplexPoint(tuple(coords)))
        t = ProductPoint(tuple(comps))
        i = rng.randrange(m_used)
        size = rng.randint(1, n_vert - 1)
        F = Face(n_vert, frozenset(rng.sample(range(1, n_vert + 1), size)))
        c1 = claim1_decompose(structure, t, F, i)
        c2 = claim2_bounds(structure, t, F, i)
        claims.append({"block": i, "face": sorted(F.support), "b1": str(c1.b1), "b2": str(c1.b2), **c2.to_dict()})

    chain = claim3_chain(r, H, M, G, T, m)
    if not chain["holds"]:
        raise MathematicalFailure("claim3-chain", "the inequality chain fails for these parameters")
    bound = r ** 3 / (4 ** 4 * H ** 2) * 2 ** H * G
    out = MdimLowerCertificate(
        r, H, M, h, dc.delta, Fraction(1, 2 ** dc.pool_exponent), eps, ETA, G, T, tuple(translates), candidate,
        tuple(Q), m, m_used, tuple(found),
        {"window": density_window, "I": list(dens.I), "ratio": str(dens.ratio)},
        structure, claims, chain, bound,
    )
    out.validate()
    return out
