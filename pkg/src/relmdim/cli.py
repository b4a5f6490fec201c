"""relmdim command line: entropy tables, mean-dimension certificates, transport, lemma battery.

Exit codes: 0 success, 1 named mathematical failure, 2 configuration
error, 3 resource budget exceeded, 4 internal error (a bug). Reports are canonical JSON; only the
``timings`` block varies between identical runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .battery import BATTERY
from .config import echo, load_config
from .entropy import relative_entropy_estimate
from .errors import MathematicalFailure, RelmdimError, ResourceLimit
from .group import folner_window
from .meandim import mdim_lower_certificate
from .serialize import dumps
from .transport import (
    approximate_in_Rn,
    is_one_lipschitz,
    kantorovich_dual,
    wasserstein1,
    wasserstein_window_witness,
)

TOOL = "relmdim"
INTERNAL_ERROR = 4


class _Clock:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def run(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.stages[name] = round(time.perf_counter() - t0, 6)


def _failure(exc: RelmdimError) -> dict:
    return {
        "error": type(exc).__name__,
        "kind": getattr(exc, "kind", None),
        "message": str(exc),
        "exit_code": exc.exit_code,
    }


def cmd_entropy(cfg, clock):
    est = clock.run("estimate", relative_entropy_estimate, cfg.code, cfg.windows, list(cfg.eps), cfg.period)
    table = [r.to_dict() for r in est.rows]
    results = {"entropy": est.to_dict(), "non_authoritative_float_columns": ["log_count_over_n"]}
    return results, table, 0


def cmd_mdim_lower(cfg, clock):
    blocks, table, code = [], [], 0
    for H, win in cfg.runs:
        name = f"H={H},window={win}"
        try:
            cert = clock.run(
                name, mdim_lower_certificate, cfg.code, cfg.V1, cfg.V2, cfg.r, H, folner_window(win),
                period=cfg.period, budget=cfg.budget, seed=cfg.seed,
                spot_checks=cfg.spot_checks, density_window=cfg.density_window,
            )
            cert.validate()
            blocks.append({"run": name, "status": "ok", "certificate": cert.to_dict()})
            table.append({"H": H, "window": win, "M": cert.M, "T": cert.T, "m": cert.m,
                          "m_used": cert.m_used, "bound": str(cert.bound), "status": "ok"})
        except ResourceLimit as exc:
            blocks.append({"run": name, "status": "budget-exhausted", "failure": _failure(exc)})
            table.append({"H": H, "window": win, "status": "budget-exhausted"})
            code = max(code, 3)
        except MathematicalFailure as exc:
            blocks.append({"run": name, "status": "failed", "failure": _failure(exc)})
            table.append({"H": H, "window": win, "status": exc.kind})
            code = max(code, 1) if code != 3 else code
    bounds = [Fraction(t["bound"]) for t in table if t["status"] == "ok"]
    results = {
        "runs": blocks,
        "bound_column": [str(b) for b in bounds],
        "bound_strictly_increasing": all(a < b for a, b in zip(bounds, bounds[1:])),
    }
    return results, table, code


def cmd_transport(cfg, clock):
    mu, nu = cfg.mu, cfg.nu
    value, plan = clock.run("primal", wasserstein1, mu, nu)
    dual, f = clock.run("dual", kantorovich_dual, mu, nu)
    out = {
        "mu": mu.to_dict(),
        "nu": nu.to_dict(),
        "distance": str(value),
        "dual_value": str(dual),
        "primal_equals_dual": value == dual,
        "plan": {
            "sources": [str(x) for x in plan.sources],
            "targets": [str(y) for y in plan.targets],
            "matrix": [[str(v) for v in row] for row in plan.matrix],
        },
        "potential": {str(x): str(v) for x, v in sorted(f.items(), key=lambda kv: kv[0].sort_key())},
        "potential_is_1_lipschitz": is_one_lipschitz(f),
    }
    if cfg.window is not None:
        wv, s = clock.run("window", wasserstein_window_witness, folner_window(cfg.window), mu, nu)
        out["window"] = {"size": cfg.window, "value": str(wv), "maximizing_shift": s}
    if cfg.code is not None:
        n, xs1, xs2 = clock.run("relation", approximate_in_Rn, mu, nu, cfg.code)
        out["relation"] = {"n": n, "points_mu": [str(x) for x in xs1], "points_nu": [str(x) for x in xs2]}
    table = [{"distance": out["distance"], "dual_value": out["dual_value"],
              "primal_equals_dual": out["primal_equals_dual"]}]
    return out, table, 0 if value == dual else 1


def _item_seed(seed: int, name: str) -> int:
    return random.Random(f"{seed}:{name}").getrandbits(64)


def cmd_verify_lemmas(cfg, clock):
    items, table, code = [], [], 0
    if cfg.budget == 0:
        print("relmdim: warning: zero budget, every item skipped", file=sys.stderr)
    for name in cfg.items:
        if cfg.budget == 0:
            items.append({"name": name, "status": "skipped"})
            table.append({"name": name, "status": "skipped", "counterexamples": 0})
            continue
        kw = dict(cfg.params.get(name, {}))
        if name == "lebesgue-oracle":
            kw.setdefault("budget", cfg.budget)
        try:
            item = clock.run(name, BATTERY[name], _item_seed(cfg.seed, name), **kw)
        except ResourceLimit as exc:
            item = {"name": name, "status": "budget-exhausted", "failure": _failure(exc)}
            code = 3
        except TypeError as exc:
            item = {"name": name, "status": "config-error", "failure": {"message": str(exc)}}
            code = max(code, 2) if code != 3 else code
        if item["status"] == "fail" and code == 0:
            code = 1
        items.append(item)
        table.append({"name": name, "status": item["status"], "counterexamples": len(item.get("counterexamples", []))})
    return {"items": items}, table, code


COMMANDS = {
    "entropy": cmd_entropy,
    "mdim-lower": cmd_mdim_lower,
    "transport": cmd_transport,
    "verify-lemmas": cmd_verify_lemmas,
}


def to_csv(table: list[dict]) -> str:
    buf = io.StringIO()
    cols: list[str] = []
    for row in table:
        cols.extend(k for k in row if k not in cols)
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in table:
        w.writerow({k: row.get(k, "") for k in cols})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config (schema 1)")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed for randomized searches")
        sp.add_argument("--budget", type=int, help="search operation budget")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def run(argv=None) -> tuple[int, dict | None, str]:
    """Run a command; returns (exit code, report, rendered output)."""
    args = build_parser().parse_args(argv)
    clock = _Clock()
    try:
        cfg = load_config(args.config, args.command, args.seed, args.budget)
    except RelmdimError as exc:
        print(f"{TOOL}: {exc}", file=sys.stderr)
        return exc.exit_code, None, ""
    report = {"tool": TOOL, "version": __version__, "command": args.command, "config": echo(cfg)}
    try:
        results, table, code = COMMANDS[args.command](cfg, clock)
        report["status"] = "ok" if code == 0 else "failed"
        report["results"] = results
    except RelmdimError as exc:
        code = exc.exit_code
        report["status"] = "failed"
        report["failure"] = _failure(exc)
        table = [{"status": "failed", "kind": getattr(exc, "kind", ""), "message": str(exc)}]
        print(f"{TOOL}: {exc}", file=sys.stderr)
    report["timings"] = clock.stages
    text = to_csv(table) if args.format == "csv" else dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code, report, text


def main(argv=None) -> int:
    try:
        return run(argv)[0]
    except Exception as exc:  # a crash must not look like a mathematical failure
        print(f"{TOOL}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
