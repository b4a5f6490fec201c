"""Balanced pattern families, shattering, and the pattern-extraction lemma.

Patterns are tuples over {1, 2} aligned with the sorted domain of their
family. ``E_sigma`` subsets are plain frozensets of group elements.

The extraction pipeline follows the counting proof: choose a window W0
hit by the most admissible patterns, freeze the pattern outside W0 to its
most popular value, and shatter what remains. The proof's window size
``floor(delta * N)`` is tiny at desk scale, so :func:`ind_extract` tries
every window size from that value up to N and keeps the best outcome.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .entropy import IndependenceCertificate, patterns
from .errors import InvalidArgument, ResourceLimit, StructureError
from .group import as_subset
from .symbolic import Cylinder, PeriodicPoint, SlidingBlockCode, apply_factor

EXACT_SHATTER_LIMIT = 14
ORACLE_LIMIT = 8
WINDOW_ENUMERATION_BUDGET = 200_000


def entropy_function(x) -> float:
    """-x log x on the open unit interval."""
    if not 0 < x < 1:
        raise InvalidArgument("entropy_function needs 0 < x < 1")
    x = float(x)
    return -x * math.log(x)


def _rate(tau: float, delta: float) -> float:
    f = entropy_function
    return (-f(tau) - f(1 - delta) + f(tau - delta) + delta * math.log(2)) / delta


@dataclass(frozen=True)
class PatternFamily:
    domain: tuple[int, ...]
    patterns: frozenset

    def __post_init__(self):
        dom = tuple(sorted(set(self.domain)))
        object.__setattr__(self, "domain", dom)
        pats = frozenset(tuple(p) for p in self.patterns)
        for p in pats:
            if len(p) != len(dom) or any(v not in (1, 2) for v in p):
                raise InvalidArgument(f"pattern {p} is not a {{1,2}}-valued map on the domain")
        object.__setattr__(self, "patterns", pats)

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(sorted(self.patterns))

    def index(self, elements) -> tuple[int, ...]:
        pos = {g: k for k, g in enumerate(self.domain)}
        return tuple(pos[g] for g in elements)

    def traces(self, I) -> set:
        idx = self.index(I)
        return {tuple(p[k] for k in idx) for p in self.patterns}

    def shatters(self, I) -> bool:
        return len(self.traces(I)) == 2 ** len(tuple(I))


def restrict(pattern, domain, I) -> tuple:
    pos = {g: k for k, g in enumerate(domain)}
    return tuple(pattern[pos[g]] for g in I)


def is_balanced(pattern) -> bool:
    return 2 * sum(1 for v in pattern if v == 1) == len(pattern)


def balanced_patterns(E) -> PatternFamily:
    """All sigma in {1,2}^E taking each value on exactly half of E."""
    dom = tuple(as_subset(E))
    if not dom or len(dom) % 2:
        raise InvalidArgument("balanced patterns need a nonempty domain of even size")
    half = len(dom) // 2
    pats = set()
    for ones in itertools.combinations(range(len(dom)), half):
        p = [2] * len(dom)
        for k in ones:
            p[k] = 1
        pats.add(tuple(p))
    return PatternFamily(dom, frozenset(pats))


def sauer_shelah_bound(n: int, k: int) -> int:
    return sum(math.comb(n, i) for i in range(k + 1))


# -- shattering ------------------------------------------------------------------


@dataclass
class ShatterResult:
    I: tuple[int, ...]
    witnesses: dict  # trace on I -> a pattern of the family realizing it
    mode: str

    def validate(self, family: PatternFamily) -> bool:
        if set(self.witnesses) != set(itertools.product((1, 2), repeat=len(self.I))):
            return False
        return all(
            p in family.patterns and restrict(p, family.domain, self.I) == w
            for w, p in self.witnesses.items()
        )


def _witness_table(family: PatternFamily, I) -> dict:
    table = {}
    for p in sorted(family.patterns):
        table.setdefault(restrict(p, family.domain, I), p)
    return table


def shatter_extract(family: PatternFamily, mode: str = "exact") -> ShatterResult:
    """A set shattered by the family, with one witness pattern per trace.

    ``exact`` returns a largest shattered set (first in lexicographic order
    among the largest); ``greedy`` scans the domain once and keeps each
    coordinate that preserves shattering.
    """
    if len(family) == 0:
        raise InvalidArgument("cannot shatter with an empty family")
    dom = family.domain
    if mode == "exact":
        if len(dom) > EXACT_SHATTER_LIMIT:
            raise ResourceLimit(f"exact shattering is limited to |W| <= {EXACT_SHATTER_LIMIT}")
        top = min(len(dom), int(math.log2(len(family))))
        for k in range(top, -1, -1):
            for I in itertools.combinations(dom, k):
                if family.shatters(I):
                    return ShatterResult(I, _witness_table(family, I), mode)
        raise AssertionError("the empty set is always shattered")
    if mode == "greedy":
        I: tuple[int, ...] = ()
        for g in dom:
            if family.shatters(I + (g,)):
                I = I + (g,)
        return ShatterResult(I, _witness_table(family, I), mode)
    raise InvalidArgument(f"unknown shatter mode {mode!r}")


# -- the extraction lemma --------------------------------------------------------


@dataclass(frozen=True)
class IndExtractConfig:
    d: Fraction
    tau: Fraction
    delta: Fraction = Fraction(1, 20)
    theta1: float | None = None
    theta2: float | None = None

    def __post_init__(self):
        for name in ("d", "tau", "delta"):
            v = getattr(self, name)
            object.__setattr__(self, name, Fraction(str(v)) if isinstance(v, float) else Fraction(v))
        if not 0 < self.d <= 1:
            raise InvalidArgument("d must lie in (0, 1]")
        if not Fraction(1, 2) < self.tau < 1:
            raise InvalidArgument("tau must lie in (1/2, 1)")
        if not 0 < self.delta < Fraction(1, 4) or self.delta >= self.tau:
            raise InvalidArgument("delta must lie in (0, 1/4) and below tau")
        cap = math.log(2 * float(self.tau))
        t1 = 0.9 * cap if self.theta1 is None else float(self.theta1)
        t2 = t1 / 2 if self.theta2 is None else float(self.theta2)
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)
        if not 0 < t2 < t1 < cap:
            raise InvalidArgument("need 0 < theta2 < theta1 < log(2 tau)")
        if not _rate(float(self.tau), float(self.delta)) > t1:
            raise InvalidArgument("delta too large: the counting rate does not exceed theta1")

    @classmethod
    def admissible(cls, d, tau) -> "IndExtractConfig":
        """Default config, halving delta until the rate constraint holds."""
        delta = Fraction(1, 20)
        for _ in range(40):
            try:
                return cls(d, tau, delta)
            except InvalidArgument:
                delta /= 2
        raise InvalidArgument(f"no admissible delta for tau = {tau}")

    def rate(self) -> float:
        return _rate(float(self.tau), float(self.delta))


@dataclass
class ExtractionCertificate:
    E: tuple[int, ...]
    I: tuple[int, ...]
    witnesses: dict  # omega on I -> sigma on E
    status: str
    window_size: int
    proof_window_size: int
    stages: list = field(default_factory=list)

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.I), len(self.E))

    def validate(self, family: PatternFamily, subsets: Mapping) -> bool:
        """Table lookup: every omega has a stored sigma in S' with sigma|I = omega and I in E_sigma."""
        I = set(self.I)
        for omega in itertools.product((1, 2), repeat=len(self.I)):
            sigma = self.witnesses.get(omega)
            if sigma is None or sigma not in family.patterns:
                return False
            if restrict(sigma, family.domain, self.I) != omega:
                return False
            if not I <= set(subsets[sigma]):
                return False
        return True

    def to_dict(self) -> dict:
        enc = lambda p: "".join(map(str, p))  # noqa: E731
        return {
            "E": list(self.E),
            "I": list(self.I),
            "ratio": str(self.ratio),
            "status": self.status,
            "window_size": self.window_size,
            "proof_window_size": self.proof_window_size,
            "witnesses": {enc(w): enc(s) for w, s in sorted(self.witnesses.items())},
            "stages": self.stages,
        }


def _check_hypotheses(E, family: PatternFamily, subsets: Mapping, cfg: IndExtractConfig):
    N = len(E)
    if N == 0 or N % 2:
        raise InvalidArgument("|E| must be even and positive")
    if tuple(family.domain) != E:
        raise InvalidArgument("pattern family domain differs from E")
    if len(family) == 0:
        raise InvalidArgument("S' is empty")
    if any(not is_balanced(p) for p in family.patterns):
        raise InvalidArgument("S' must consist of balanced patterns")
    if not len(family) > cfg.d * math.comb(N, N // 2):
        raise InvalidArgument(f"|S'| = {len(family)} does not exceed d |S_E|")
    for p in family.patterns:
        Es = set(subsets.get(p, ()))
        if not Es <= set(E):
            raise InvalidArgument("E_sigma must be a subset of E")
        if not len(Es) > cfg.tau * N:
            raise InvalidArgument(f"|E_sigma| = {len(Es)} does not exceed tau |E|")


def _extract_at(E, family, subsets, w):
    windows_total = math.comb(len(E), w)
    if windows_total > WINDOW_ENUMERATION_BUDGET:
        raise ResourceLimit(f"{windows_total} windows of size {w} exceed the enumeration budget")
    pats = sorted(family.patterns)
    sets = {p: frozenset(subsets[p]) for p in pats}
    best_W, best_hits = None, []
    for W in itertools.combinations(E, w):
        hits = [p for p in pats if sets[p].issuperset(W)]
        if len(hits) > len(best_hits):
            best_W, best_hits = W, hits
    stage = {"window_size": w, "W0": None, "A_W0": 0, "sigma0": None, "S0": 0, "I": []}
    if best_W is None:
        return (), {}, stage
    rest = tuple(g for g in E if g not in best_W)
    groups: dict[tuple, list] = {}
    for p in best_hits:
        groups.setdefault(restrict(p, E, rest), []).append(p)
    sigma0 = max(sorted(groups), key=lambda k: len(groups[k]))
    chosen = groups[sigma0]
    S0 = PatternFamily(best_W, frozenset(restrict(p, E, best_W) for p in chosen))
    mode = "exact" if len(best_W) <= EXACT_SHATTER_LIMIT else "greedy"
    sh = shatter_extract(S0, mode)
    lift = {restrict(p, E, best_W): p for p in reversed(chosen)}
    witnesses = {omega: lift[trace] for omega, trace in sh.witnesses.items()}
    stage.update(
        W0=list(best_W),
        A_W0=len(best_hits),
        sigma0="".join(map(str, sigma0)),
        S0=len(S0),
        I=list(sh.I),
        shatter_mode=mode,
    )
    return sh.I, witnesses, stage


def ind_extract(E, family: PatternFamily, subsets: Mapping, cfg: IndExtractConfig,
                escalate: bool = True) -> ExtractionCertificate:
    """Run the window / freeze / shatter pipeline and return a certificate.

    ``subsets`` maps each pattern of ``family`` to its set E_sigma. With
    ``escalate`` every window size from ``max(1, floor(delta N))`` to N is
    tried and the largest I kept (smallest window on ties); otherwise only
    the proof's window size is used.
    """
    E = tuple(as_subset(E))
    _check_hypotheses(E, family, subsets, cfg)
    N = len(E)
    proof_w = math.floor(cfg.delta * N)
    sizes = range(max(1, proof_w), N + 1) if escalate else [max(1, proof_w)]
    best = None
    stages = []
    for w in sizes:
        I, wit, stage = _extract_at(E, family, subsets, w)
        stages.append(stage)
        if best is None or len(I) > len(best[0]):
            best = (I, wit, w)
    I, wit, w = best
    if not I:
        any_sigma = min(family.patterns)
        wit = {(): any_sigma}
    status = "ok" if I else "extraction-failed"
    return ExtractionCertificate(E, tuple(I), wit, status, w, proof_w, stages)


def is_valid_extraction(I, family: PatternFamily, subsets: Mapping) -> bool:
    """Whether every omega on I is realized by some sigma in S' with I inside E_sigma."""
    I = tuple(I)
    Iset = set(I)
    traces = {
        restrict(p, family.domain, I) for p in family.patterns if Iset <= set(subsets[p])
    }
    return len(traces) == 2 ** len(I)


@dataclass(frozen=True)
class OracleResult:
    size: int
    I: tuple[int, ...]


def ind_oracle(E, family: PatternFamily, subsets: Mapping) -> OracleResult:
    """Largest valid I by exhaustive search (|E| <= 8)."""
    E = tuple(as_subset(E))
    if len(E) > ORACLE_LIMIT:
        raise ResourceLimit(f"oracle limited to |E| <= {ORACLE_LIMIT}")
    if len(family) == 0:
        raise InvalidArgument("S' is empty")
    for k in range(len(E), -1, -1):
        for I in itertools.combinations(E, k):
            if is_valid_extraction(I, family, subsets):
                return OracleResult(k, I)
    raise AssertionError("the empty set is always valid")


# -- from measure-level data to base-level independence -----------------------


@dataclass
class BaseIndependenceResult:
    I: tuple[int, ...]
    certificate: IndependenceCertificate
    extraction: ExtractionCertificate
    transcript: dict


def _psi(sigma, E, A1: Cylinder, A2: Cylinder, x: PeriodicPoint) -> Fraction:
    ones = [h for h, s in zip(E, sigma) if s == 1]
    twos = [h for h, s in zip(E, sigma) if s == 2]
    hit1 = sum(1 for h in ones if A1.contains(x, at=h))
    hit2 = sum(1 for h in twos if A2.contains(x, at=h))
    return Fraction(hit1, len(ones)) + Fraction(hit2, len(twos))


def extract_base_independence(code: SlidingBlockCode, A1: Cylinder, A2: Cylinder, a1, a2,
                              atoms: Mapping, E, period: int | None = None,
                              escalate: bool = True) -> BaseIndependenceResult:
    """Turn measure-level independence over E into an independence set for (A1, A2).

    ``atoms[sigma]`` lists x_1^sigma .. x_L^sigma, so that lambda_sigma is
    uniform on them; position i of every list must lie over a common y_i.
    Only balanced sigma are used. When ``period`` is given the output is
    also confirmed by an independent lift search at that period.
    """
    from .entropy import is_independence_set

    a1, a2 = Fraction(a1), Fraction(a2)
    if not (0 < a1 <= 1 and 0 < a2 <= 1):
        raise InvalidArgument("a1, a2 must lie in (0, 1]")
    if not a1 + a2 > 1:
        raise InvalidArgument("need a1 + a2 > 1")
    E = tuple(as_subset(E))
    if not E or len(E) % 2:
        raise StructureError("balance-violation", "|E| must be even and positive")
    S_E = sorted(balanced_patterns(E).patterns)
    missing = [s for s in S_E if s not in atoms]
    if missing:
        raise StructureError("balance-violation", f"no measure given for balanced pattern {missing[0]}")

    L = len(atoms[S_E[0]])
    if L == 0:
        raise StructureError("fiber-mismatch", "empty atom list")
    base = [apply_factor(code, x) for x in atoms[S_E[0]]]
    for s in S_E:
        xs = atoms[s]
        if len(xs) != L or any(apply_factor(code, x) != y for x, y in zip(xs, base)):
            raise StructureError("fiber-mismatch", f"atoms for {s} do not sit over the common base points")

    A = {1: A1, 2: A2}
    a = {1: a1, 2: a2}
    for s in S_E:
        for h, v in zip(E, s):
            mass = Fraction(sum(1 for x in atoms[s] if A[v].contains(x, at=h)), L)
            if not mass > a[v]:
                raise StructureError("mass-deficit", f"lambda_{s} gives mass {mass} <= a{v} at h={h}")

    b = (a1 + a2 + 1) / 2
    dens = (a1 + a2 - 1) / (3 - a1 - a2)
    psi = {s: [_psi(s, E, A1, A2, x) for x in atoms[s]] for s in S_E}
    W = {}
    for s in S_E:
        integral = sum(psi[s]) / L
        if not integral > a1 + a2:
            raise StructureError("mass-deficit", f"integral of Psi_{s} is {integral}")
        W[s] = [i for i, v in enumerate(psi[s]) if v > b]
        if not Fraction(len(W[s]), L) > dens:
            raise StructureError("mass-deficit", f"lambda_{s}(H_sigma) = {len(W[s])}/{L} <= d")

    rows = {k: [s for s in S_E if k in W[s]] for k in range(L)}
    i_E = max(range(L), key=lambda k: (len(rows[k]), -k))
    chosen = rows[i_E]
    if not len(chosen) > dens * len(S_E):
        raise StructureError("mass-deficit", "no row index is hit by more than d |S_E| patterns")
    tau = b / 2
    subsets = {}
    for s in chosen:
        x = atoms[s][i_E]
        subsets[s] = frozenset(h for h, v in zip(E, s) if A[v].contains(x, at=h))
        if not len(subsets[s]) > tau * len(E):
            raise StructureError("mass-deficit", f"|E_sigma| <= tau |E| for {s}")

    family = PatternFamily(E, frozenset(chosen))
    cfg = IndExtractConfig.admissible(dens, tau)
    ext = ind_extract(E, family, subsets, cfg, escalate=escalate)
    if not ext.validate(family, subsets):
        raise StructureError("extraction-invalid", "extraction certificate failed re-validation")

    wit = {omega: atoms[sigma][i_E] for omega, sigma in ext.witnesses.items()}
    cert = IndependenceCertificate(A1, A2, ext.I, base[i_E], wit)
    cert.validate(code)
    if period is not None and ext.I:
        if is_independence_set(ext.I, A1, A2, code, period) is None:
            raise StructureError("revalidation", "lift search found no certificate for I")

    enc = lambda p: "".join(map(str, p))  # noqa: E731
    transcript = {
        "b": str(b),
        "d": str(dens),
        "tau": str(tau),
        "delta": str(cfg.delta),
        "L": L,
        "i_E": i_E,
        "psi": {enc(s): [str(v) for v in psi[s]] for s in S_E},
        "W_sigma": {enc(s): W[s] for s in S_E},
        "S_iE": len(chosen),
        "E_sigma": {enc(s): sorted(subsets[s]) for s in chosen},
    }
    return BaseIndependenceResult(ext.I, cert, ext, transcript)
