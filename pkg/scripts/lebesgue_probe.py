"""Probe the least overlap order of face-avoiding covers of simplex products."""

import argparse
import json
import sys

from relmdim.simplex import lebesgue_ord_oracle, oracle_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shapes", nargs="+", default=["2:1:10", "3:1:6", "2:2:6"], help="n:k:q triples")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=2_000_000)
    ap.add_argument("--json", action="store_true", help="full reports instead of the CSV table")
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args(argv)

    reports = []
    for shape in args.shapes:
        n, k, q = map(int, shape.split(":"))
        reports.append(lebesgue_ord_oracle(n, k, q, budget=args.budget, seed=args.seed))
    if args.json:
        json.dump([r.to_dict() for r in reports], args.out, indent=2, sort_keys=True)
        args.out.write("\n")
    else:
        args.out.write(oracle_csv(reports))


if __name__ == "__main__":
    main()
