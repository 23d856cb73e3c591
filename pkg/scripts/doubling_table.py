#!/usr/bin/env python3
"""Print mean oracle evaluations and doubling ratios per (backend, workload) from a bench CSV.

A ratio near 8 means cubic total work, near 4 quadratic.
"""

import argparse
from collections import defaultdict

import numpy as np

from dynpair.bench import doubling_ratios, read_rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("csv")
    p.add_argument("--metric", default="oracle_evals", choices=["oracle_evals", "wall_seconds"])
    args = p.parse_args()
    rows = read_rows(args.csv)
    if not all(r.checks_passed for r in rows):
        print("warning: some rows failed verification")
    ratios = doubling_ratios(rows, args.metric)
    means = defaultdict(list)
    for r in rows:
        means[(r.backend, r.app, r.kind, r.metric, r.n)].append(getattr(r, args.metric))
    print(f"{'app':7} {'kind':18} {'metric':11} {'backend':7} {'n':>6} {'mean ' + args.metric:>16} {'ratio':>6}")
    for key in sorted(means, key=lambda k: (k[1], k[2], k[3], k[0], k[4])):
        b, app, kind, metric, n = key
        ratio = ratios.get(key)
        print(f"{app:7} {kind:18} {metric:11} {b:7} {n:6d} {np.mean(means[key]):16.6g} "
              f"{'' if ratio is None else f'{ratio:6.2f}'}")


if __name__ == "__main__":
    main()
