#!/usr/bin/env python3
"""Log-log plot of mean oracle evaluations against n, one panel per workload.

Needs matplotlib (``pip install -e .[plot]``).
"""

import argparse
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from dynpair.bench import read_rows  # noqa: E402


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("csv")
    p.add_argument("--out", default="results/evals.png")
    args = p.parse_args()
    series = defaultdict(lambda: defaultdict(list))
    for r in read_rows(args.csv):
        series[(r.app, r.kind, r.metric)][(r.backend, r.n)].append(r.oracle_evals)
    panels = sorted(series)
    cols = min(3, len(panels))
    rows = -(-len(panels) // cols)
    fig, axes = plt.subplots(rows, cols, figsize=(4.5 * cols, 3.5 * rows), squeeze=False)
    for ax, key in zip(axes.flat, panels):
        by_backend = defaultdict(list)
        for (b, n), vals in series[key].items():
            by_backend[b].append((n, np.mean(vals)))
        for b, pts in sorted(by_backend.items()):
            pts.sort()
            ax.loglog([n for n, _ in pts], [v for _, v in pts], marker="o", label=b)
        ax.set_title(" / ".join(key), fontsize=9)
        ax.set_xlabel("n")
        ax.set_ylabel("oracle evals")
        ax.legend(fontsize=7)
    for ax in list(axes.flat)[len(panels):]:
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
