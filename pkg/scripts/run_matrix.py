#!/usr/bin/env python3
"""Desk-scale experiment matrix: every backend on every workload, appended to one CSV.

    python3 scripts/run_matrix.py --out results/matrix.csv
    python3 scripts/run_matrix.py --quick          # small sizes, a couple of reps

Then ``scripts/doubling_table.py results/matrix.csv`` and
``scripts/plot_evals.py results/matrix.csv``.
"""

import argparse
import logging
import time
from dataclasses import dataclass, field

from dynpair.bench import RunConfig, run_experiment, write_rows
from dynpair.generators import InstanceSpec

log = logging.getLogger("run_matrix")


@dataclass
class Matrix:
    backends: tuple = ("bf", "nh", "cl", "mc", "fp", "qt")
    sizes: list = field(default_factory=lambda: [125, 250, 500, 1000])
    reps: int = 3
    # (app, instance) pairs; bf is capped because it is cubic
    cells: list = field(default_factory=lambda: [
        ("cluster", InstanceSpec("uniform_hypercube", dim=20)),
        ("cluster", InstanceSpec("xor_fractal", dim=20)),
        ("cluster", InstanceSpec("tree_leaves", depth=32)),
        ("cluster", InstanceSpec("pseudorandom_pairs")),
        ("match", InstanceSpec("uniform_hypercube", dim=20)),
        ("match", InstanceSpec("uniform_hypercube", dim=20, metric="dot_product", negate=True)),
        ("mftsp", InstanceSpec("uniform_hypercube", dim=2)),
        ("citsp", InstanceSpec("uniform_hypercube", dim=2)),
        ("churn", InstanceSpec("uniform_hypercube", dim=2)),
        ("star", InstanceSpec()),
    ])
    bf_max: int = 500


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--out", default="results/matrix.csv")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--verify-max", type=int, default=0)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    m = Matrix(sizes=[64, 128, 256], reps=2) if args.quick else Matrix()
    for app, spec in m.cells:
        for b in m.backends:
            sizes = [n for n in m.sizes if b != "bf" or n <= m.bf_max]
            if app == "citsp" and b == "bf":
                sizes = [n for n in sizes if n <= 250]
            t0 = time.perf_counter()
            rows = run_experiment(RunConfig(b, app, spec, reps=m.reps, sizes=sizes, verify_max=args.verify_max))
            write_rows(rows, args.out)
            kind, metric = (rows[0].kind, rows[0].metric) if rows else (spec.kind, spec.resolved_metric)
            log.info("%-6s %-4s %-18s %-11s %6.1fs", app, b, kind, metric, time.perf_counter() - t0)


if __name__ == "__main__":
    main()
