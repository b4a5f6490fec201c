"""Fiber-wise separated-set counts for a few standard factor maps, as CSV."""

import argparse
import csv
import sys

from relmdim.entropy import relative_entropy_estimate
from relmdim.symbolic import full_shift, identity_code, projection_code, xor_code

CODES = {
    "projection": projection_code,
    "identity": lambda: identity_code(full_shift(2)),
    "xor": xor_code,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--windows", type=int, nargs="+", default=[2, 4, 6, 8])
    ap.add_argument("--eps", nargs="+", default=["3/5", "1/3"])
    ap.add_argument("--period", type=int, default=8)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args(argv)

    w = csv.writer(args.out, lineterminator="\n")
    w.writerow(["code", "n", "eps", "count", "log_count_over_n", "base_point"])
    for name, make in CODES.items():
        est = relative_entropy_estimate(make(), args.windows, args.eps, args.period)
        for r in est.rows:
            w.writerow([name, r.n, r.eps, r.count, f"{r.value:.6f}", r.y])


if __name__ == "__main__":
    main()
