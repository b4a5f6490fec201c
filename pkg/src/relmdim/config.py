"""Experiment configs: JSON files parsed into dataclasses with field-path diagnostics.

Schema version 1. Every config is a JSON object with ``"schema": 1`` plus
command-specific fields:

entropy
    ``system`` (system spec, or ``system_path`` relative to the config file),
    ``windows`` (list of positive ints), ``eps`` (rational or list of them),
    ``period`` (positive int).
mdim-lower
    ``system``, ``V1``/``V2`` (cylinders ``{"offsets": [...], "words": [[...]]}``),
    ``r`` (rational in (0, 1]), ``runs`` (list of ``{"H": int, "window": int}``),
    optional ``period``, ``spot_checks`` (default 3), ``density_window`` (default 8).
transport
    ``mu``/``nu`` (``{"atoms": [{"word": "01", "weight": "1/2"}]}``), optional
    ``window`` (int n, reports the max over shifts in [0, n)), optional ``system``
    (checks the pair against the induced factor and expands it uniformly).
verify-lemmas
    optional ``items`` (names from the battery, default: all, in battery order)
    and ``params`` (``{item: {keyword: value}}``).

Shared optional fields: ``seed`` (unsigned 64-bit int), ``budget`` (search
operations). Command-line flags override both.

A system spec is ``{"alphabet": k, "forbidden": [[...], ...], "target":
{...}?, "code": {"radius": w, "rule": {"kind": ...}}}`` where ``kind`` is
``identity``, ``projection`` (with ``k2``; the target keeps ``a`` from the
symbol ``a * k2 + b``), ``constant``, ``xor`` or ``table`` (with ``entries``:
a list of ``[block, symbol]`` pairs covering every block of length 2w+1;
requires ``target``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ConfigError, RelmdimError
from .serialize import cylinder_from_dict
from .symbolic import Cylinder, SlidingBlockCode, SymbolicSystem
from .transport import EmpiricalMeasure

SCHEMA_VERSION = 1
MAX_SEED = 2 ** 64 - 1
DEFAULT_BUDGET = 2_000_000


class _Ctx:
    """Raw text kept around so field errors can name a line."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, path: str, message: str):
        key = path.rsplit(".", 1)[-1].split("[")[0]
        line = None
        needle = f'"{key}"'
        for k, ln in enumerate(self.text.splitlines(), 1):
            if needle in ln:
                line = k
                break
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: field '{path}': {message}")


def _get(ctx, obj, key, path, kind=None, default=...):
    if not isinstance(obj, dict):
        ctx.fail(path, "expected an object")
    if key not in obj:
        if default is ...:
            ctx.fail(f"{path}.{key}" if path else key, "missing required field")
        return default
    val = obj[key]
    p = f"{path}.{key}" if path else key
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        ctx.fail(p, f"expected an integer, got {json.dumps(val)}")
    if kind in (list, dict, str) and not isinstance(val, kind):
        ctx.fail(p, f"expected {kind.__name__}, got {json.dumps(val)}")
    return val


def _rational(ctx, val, path) -> Fraction:
    if isinstance(val, bool):
        ctx.fail(path, "expected a rational")
    try:
        return Fraction(str(val)) if isinstance(val, float) else Fraction(val)
    except (TypeError, ValueError, ZeroDivisionError):
        ctx.fail(path, f"expected a rational like \"3/5\", got {json.dumps(val)}")


def _system(ctx, spec, path) -> SymbolicSystem:
    k = _get(ctx, spec, "alphabet", path, int)
    forb = _get(ctx, spec, "forbidden", path, list, [])
    words = []
    for j, w in enumerate(forb):
        if isinstance(w, str):
            w = [int(c) for c in w]
        if not isinstance(w, list) or not all(isinstance(c, int) for c in w):
            ctx.fail(f"{path}.forbidden[{j}]", "expected a list of symbols")
        words.append(tuple(w))
    try:
        return SymbolicSystem(k, tuple(words))
    except RelmdimError as exc:
        ctx.fail(f"{path}.alphabet", str(exc))


def _code(ctx, spec, path) -> SlidingBlockCode:
    from .symbolic import full_shift

    src = _system(ctx, spec, path)
    code = _get(ctx, spec, "code", path, dict)
    cpath = f"{path}.code" if path else "code"
    radius = _get(ctx, code, "radius", cpath, int, 0)
    rule = _get(ctx, code, "rule", cpath, dict)
    rpath = f"{cpath}.rule"
    kind = _get(ctx, rule, "kind", rpath, str)
    target = None
    if "target" in spec:
        target = _system(ctx, spec["target"], f"{path}.target" if path else "target")
    c = radius
    try:
        if kind == "identity":
            return SlidingBlockCode.from_rule(src, target or src, radius, lambda b: b[c], "identity")
        if kind == "projection":
            k2 = _get(ctx, rule, "k2", rpath, int, 2)
            if k2 < 1 or src.alphabet % k2:
                ctx.fail(f"{rpath}.k2", f"alphabet {src.alphabet} is not a multiple of k2 = {k2}")
            tgt = target or full_shift(src.alphabet // k2)
            return SlidingBlockCode.from_rule(src, tgt, radius, lambda b: b[c] // k2, "projection")
        if kind == "constant":
            return SlidingBlockCode.from_rule(src, target or full_shift(1), radius, lambda b: 0, "constant")
        if kind == "xor":
            if src.alphabet != 2 or radius < 1:
                ctx.fail(rpath + ".kind", "xor needs a binary alphabet and radius >= 1")
            return SlidingBlockCode.from_rule(src, target or src, radius, lambda b: b[c] ^ b[c + 1], "xor")
        if kind == "table":
            if target is None:
                ctx.fail(f"{path}.target" if path else "target", "a table rule needs an explicit target")
            entries = _get(ctx, rule, "entries", rpath, list)
            table = {}
            for j, e in enumerate(entries):
                if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], list) and isinstance(e[1], int)):
                    ctx.fail(f"{rpath}.entries[{j}]", "expected [block, symbol]")
                table[tuple(e[0])] = e[1]
            return SlidingBlockCode(src, target, radius, table, "table")
    except ConfigError:
        raise
    except RelmdimError as exc:
        ctx.fail(rpath, str(exc))
    ctx.fail(f"{rpath}.kind", f"unknown rule kind {json.dumps(kind)}")


def _cylinder(ctx, spec, path) -> Cylinder:
    offs = _get(ctx, spec, "offsets", path, list)
    words = _get(ctx, spec, "words", path, list)
    if not all(isinstance(w, list) and len(w) == len(offs) for w in words):
        ctx.fail(f"{path}.words", "every word needs one symbol per offset")
    try:
        return cylinder_from_dict({"offsets": offs, "words": words})
    except (RelmdimError, TypeError) as exc:
        ctx.fail(path, str(exc))


def _measure(ctx, spec, path) -> EmpiricalMeasure:
    atoms = _get(ctx, spec, "atoms", path, list)
    if not atoms:
        ctx.fail(f"{path}.atoms", "a measure needs at least one atom")
    try:
        return EmpiricalMeasure.from_dict(spec)
    except (RelmdimError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        ctx.fail(f"{path}.atoms", str(exc))


def _positive_ints(ctx, vals, path):
    if not isinstance(vals, list) or not vals or not all(isinstance(v, int) and not isinstance(v, bool) and v > 0
                                                         for v in vals):
        ctx.fail(path, "expected a nonempty list of positive integers")
    return tuple(vals)


@dataclass
class CommonConfig:
    command: str
    seed: int | None
    budget: int
    raw: dict


@dataclass
class EntropyConfig(CommonConfig):
    code: SlidingBlockCode = None
    windows: tuple = ()
    eps: tuple = ()
    period: int = 1


@dataclass
class MdimConfig(CommonConfig):
    code: SlidingBlockCode = None
    V1: Cylinder = None
    V2: Cylinder = None
    r: Fraction = Fraction(1)
    runs: tuple = ()
    period: int | None = None
    spot_checks: int = 3
    density_window: int = 8


@dataclass
class TransportConfig(CommonConfig):
    mu: EmpiricalMeasure = None
    nu: EmpiricalMeasure = None
    window: int | None = None
    code: SlidingBlockCode | None = None


@dataclass
class LemmaConfig(CommonConfig):
    items: tuple = ()
    params: dict = field(default_factory=dict)


def read_config(path: str | None, command: str) -> tuple[dict, _Ctx, Path]:
    if path is None:
        return {"schema": SCHEMA_VERSION}, _Ctx("", "<defaults>"), Path.cwd()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    ctx = _Ctx(text, str(path))
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        ctx.fail("schema", f"expected {SCHEMA_VERSION}, got {json.dumps(data.get('schema'))}")
    return data, ctx, p.parent


def _system_spec(ctx, data, base: Path, required: bool = True):
    if "system" in data:
        return data["system"], ctx, "system"
    if "system_path" in data:
        sp = base / _get(ctx, data, "system_path", "", str)
        try:
            text = sp.read_text()
            spec = json.loads(text)
        except OSError as exc:
            ctx.fail("system_path", f"cannot read {sp} ({exc.strerror})")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{sp}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
        return spec, _Ctx(text, str(sp)), ""
    if required:
        ctx.fail("system", "missing required field (or give system_path)")
    return None, ctx, ""


def load_config(path: str | None, command: str, seed: int | None = None, budget: int | None = None):
    """Parse and validate a config for ``command``; flags override file values."""
    data, ctx, base = read_config(path, command)
    if seed is None and "seed" in data:
        seed = _get(ctx, data, "seed", "", int)
    if seed is not None and not 0 <= seed <= MAX_SEED:
        ctx.fail("seed", "seed must be an unsigned 64-bit integer")
    if budget is None:
        budget = _get(ctx, data, "budget", "", int, DEFAULT_BUDGET)
    if budget < 0 or (budget == 0 and command != "verify-lemmas"):
        ctx.fail("budget", "budget must be positive")
    common = dict(command=command, seed=seed, budget=budget, raw=data)

    if command == "entropy":
        spec, sctx, sp = _system_spec(ctx, data, base)
        code = _code(sctx, spec, sp)
        windows = _positive_ints(ctx, _get(ctx, data, "windows", "", list), "windows")
        eps_raw = _get(ctx, data, "eps", "")
        eps_list = eps_raw if isinstance(eps_raw, list) else [eps_raw]
        eps = tuple(_rational(ctx, e, f"eps[{j}]") for j, e in enumerate(eps_list))
        if any(e <= 0 for e in eps):
            ctx.fail("eps", "eps must be positive")
        period = _get(ctx, data, "period", "", int)
        if period < 1:
            ctx.fail("period", "period must be positive")
        return EntropyConfig(**common, code=code, windows=windows, eps=eps, period=period)

    if command == "mdim-lower":
        if seed is None:
            ctx.fail("seed", "a seed is required (config field or --seed)")
        spec, sctx, sp = _system_spec(ctx, data, base)
        code = _code(sctx, spec, sp)
        V1 = _cylinder(ctx, _get(ctx, data, "V1", "", dict), "V1")
        V2 = _cylinder(ctx, _get(ctx, data, "V2", "", dict), "V2")
        r = _rational(ctx, _get(ctx, data, "r", ""), "r")
        runs = []
        for j, run in enumerate(_get(ctx, data, "runs", "", list)):
            H = _get(ctx, run, "H", f"runs[{j}]", int)
            win = _get(ctx, run, "window", f"runs[{j}]", int)
            if H < 1 or win < 1:
                ctx.fail(f"runs[{j}]", "H and window must be positive")
            runs.append((H, win))
        if not runs:
            ctx.fail("runs", "expected at least one run")
        period = _get(ctx, data, "period", "", int, None)
        return MdimConfig(
            **common, code=code, V1=V1, V2=V2, r=r, runs=tuple(runs), period=period,
            spot_checks=_get(ctx, data, "spot_checks", "", int, 3),
            density_window=_get(ctx, data, "density_window", "", int, 8),
        )

    if command == "transport":
        mu = _measure(ctx, _get(ctx, data, "mu", "", dict), "mu")
        nu = _measure(ctx, _get(ctx, data, "nu", "", dict), "nu")
        window = _get(ctx, data, "window", "", int, None)
        if window is not None and window < 1:
            ctx.fail("window", "window must be positive")
        spec, sctx, sp = _system_spec(ctx, data, base, required=False)
        code = _code(sctx, spec, sp) if spec is not None else None
        return TransportConfig(**common, mu=mu, nu=nu, window=window, code=code)

    if command == "verify-lemmas":
        from .battery import BATTERY

        if seed is None:
            ctx.fail("seed", "a seed is required (config field or --seed)")
        items = _get(ctx, data, "items", "", list, list(BATTERY))
        for j, name in enumerate(items):
            if name not in BATTERY:
                ctx.fail(f"items[{j}]", f"unknown item {json.dumps(name)}; known: {', '.join(BATTERY)}")
        params = _get(ctx, data, "params", "", dict, {})
        for name, kw in params.items():
            if name not in BATTERY or not isinstance(kw, dict):
                ctx.fail(f"params.{name}", "expected an object keyed by a battery item")
        return LemmaConfig(**common, items=tuple(items), params=params)

    raise ConfigError(f"unknown command {command!r}")


def echo(cfg: CommonConfig) -> dict[str, Any]:
    """Config as it was read, plus the effective seed and budget."""
    out = dict(cfg.raw)
    out["seed"] = cfg.seed
    out["budget"] = cfg.budget
    return out
