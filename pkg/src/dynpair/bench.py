"""Benchmark harness: backend x application x instance sweeps written as CSV.

The primary cost metric is the number of distance evaluations made by the
closest pair structure; wall time is recorded alongside (instance
generation and brute-force verification excluded).

Run ``python -m dynpair.bench --help`` for the command line.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import random
import sys
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import BACKENDS
from .applications import agglomerate, cheapest_insertion_tsp, greedy_matching, multifragment_tsp
from .core import brute_force_min
from .generators import KINDS, InstanceSpec, StarOracle, generate

log = logging.getLogger("dynpair.bench")

APPS = ("cluster", "mftsp", "citsp", "match", "churn", "star")
CSV_COLUMNS = ("backend", "app", "kind", "metric", "n", "seed", "wall_seconds",
               "oracle_evals", "peak_objects", "checks_passed")
OUT_DIR_ENV = "DYNPAIR_OUT_DIR"


class ConfigError(ValueError):
    pass


class VerificationError(AssertionError):
    def __init__(self, reproducer: str):
        super().__init__(reproducer)
        self.reproducer = reproducer


@dataclass
class RunConfig:
    backend: str = "fp"
    app: str = "cluster"
    instance: InstanceSpec = field(default_factory=InstanceSpec)
    reps: int = 10
    sizes: list = field(default_factory=list)
    output: Optional[str] = None
    verify_max: int = 256
    capacity: int = 4096

    def validate(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.app not in APPS:
            raise ConfigError(f"unknown app {self.app!r}")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError("sizes must be strictly increasing")
        if any(s < 0 for s in self.sizes):
            raise ConfigError("sizes must be non-negative")
        if self.backend == "qt" and self.sizes and max(self.sizes) > self.capacity:
            raise ConfigError(f"quadtree capacity {self.capacity} is below size {max(self.sizes)}")
        if self.app in ("cluster", "mftsp", "citsp", "match", "churn"):
            try:
                self.instance.validate()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None


@dataclass
class RunRow:
    backend: str
    app: str
    kind: str
    metric: str
    n: int
    seed: int
    wall_seconds: float
    oracle_evals: int
    peak_objects: int
    checks_passed: bool

    def csv_line(self) -> str:
        d = asdict(self)
        d["wall_seconds"] = f"{self.wall_seconds:.6f}"
        d["checks_passed"] = "true" if self.checks_passed else "false"
        return ",".join(str(d[c]) for c in CSV_COLUMNS)


# -- verification -----------------------------------------------------------


def verifying(cls, tag: str = ""):
    """Subclass of a backend that checks every closest_pair against brute force.

    Brute-force evaluations bypass the counter; time spent checking is
    accumulated in ``verify_seconds``.
    """

    class Verified(cls):
        name = cls.name

        def __init__(self, *args, **kwargs):
            super().__init__(*args, **kwargs)
            self.ops = 0
            self.verify_seconds = 0.0

        def closest_pair(self):
            rep = super().closest_pair()
            t0 = time.perf_counter()
            self.ops += 1
            want = brute_force_min(self.oracle, self.live.array)
            if (rep is None) != (want is None) or (rep is not None and rep.d != want.d):
                raise VerificationError(
                    f"{tag} backend={cls.name} query={self.ops} n={len(self)} "
                    f"got={rep} expected={want}")
            self.verify_seconds += time.perf_counter() - t0
            return rep

    Verified.__name__ = f"Verified{cls.__name__}"
    return Verified


class _Tracker:
    """Backend factory that remembers every structure it builds."""

    def __init__(self, cls, kwargs):
        self.cls = cls
        self.kwargs = kwargs
        self.made = []
        self.name = cls.name

    def __call__(self, oracle, **kw):
        s = self.cls(oracle, **{**self.kwargs, **kw})
        self.made.append(s)
        return s

    @property
    def verify_seconds(self) -> float:
        return sum(getattr(s, "verify_seconds", 0.0) for s in self.made)


def _backend_kwargs(name: str, capacity: int) -> dict:
    return {"max_capacity": capacity} if name == "qt" else {}


def _factory(backend, n: int, verify_max: int, tag: str, capacity: int = 4096):
    cls = BACKENDS[backend] if isinstance(backend, str) else backend
    if n <= verify_max:
        cls = verifying(cls, tag)
    kwargs = _backend_kwargs(cls.name, capacity)
    return _Tracker(cls, kwargs)


# -- workloads ----------------------------------------------------------------


def churn_workload(n: int, seed: int, backend="fp", instance: Optional[InstanceSpec] = None,
                   verify_max: int = 256, capacity: int = 4096) -> RunRow:
    """10n random inserts/deletes around size n, checked against brute force for n <= verify_max.

    A mismatch stops the run and yields ``checks_passed=False``; the reproducer
    line is logged.
    """
    spec = instance or InstanceSpec(dim=2)
    spec = InstanceSpec(**{**asdict(spec), "n": 11 * n, "seed": seed})
    _, oracle = generate(spec)
    tag = f"app=churn seed={seed}"
    factory = _factory(backend, n, verify_max, tag, capacity)
    rng = random.Random(seed)
    passed = True
    t0 = time.perf_counter()
    struct = factory(oracle)
    struct.build(range(n))
    fresh = n
    live = list(range(n))
    op = -1
    try:
        struct.closest_pair()
        for op in range(10 * n):
            if len(live) < 2 or (rng.random() < 0.5 and fresh < 11 * n):
                struct.insert(fresh)
                live.append(fresh)
                fresh += 1
            else:
                x = live.pop(rng.randrange(len(live)))
                struct.delete(x)
            struct.closest_pair()
    except VerificationError as exc:
        log.warning("verification failed: %s op=%d", exc.reproducer, op)
        passed = False
    wall = time.perf_counter() - t0 - factory.verify_seconds
    return RunRow(factory.name, "churn", spec.kind, spec.resolved_metric, n, seed,
                  wall, oracle.evals, struct.peak_size, passed)


def star_workload(n: int, seed: int, backend="fp", verify_max: int = 256,
                  capacity: int = 4096) -> RunRow:
    """n base objects, then n rounds of inserting and deleting a hub near all of them."""
    oracle = StarOracle(n, seed)
    factory = _factory(backend, n, verify_max, f"app=star seed={seed}", capacity)
    t0 = time.perf_counter()
    struct = factory(oracle)
    struct.build(range(n))
    for t in range(n):
        struct.insert(n + t)
        struct.closest_pair()
        struct.delete(n + t)
        struct.closest_pair()
    wall = time.perf_counter() - t0 - factory.verify_seconds
    return RunRow(factory.name, "star", "star", "star", n, seed, wall,
                  oracle.evals, struct.peak_size, True)


_APP_FUNCS = {
    "cluster": lambda n, oracle, factory: agglomerate(n, oracle, "average", factory),
    "mftsp": lambda n, oracle, factory: multifragment_tsp(n, oracle, factory),
    "citsp": lambda n, oracle, factory: cheapest_insertion_tsp(n, oracle, factory),
    "match": lambda n, oracle, factory: greedy_matching(n, oracle, factory),
}


def run_one(backend: str, app: str, spec: InstanceSpec, verify_max: int = 256,
            capacity: int = 4096) -> RunRow:
    if app == "churn":
        return churn_workload(spec.n, spec.seed, backend, spec, verify_max, capacity)
    if app == "star":
        return star_workload(spec.n, spec.seed, backend, verify_max, capacity)
    _, oracle = generate(spec)
    tag = f"app={app} kind={spec.kind} metric={spec.resolved_metric} seed={spec.seed}"
    factory = _factory(backend, spec.n, verify_max, tag, capacity)
    t0 = time.perf_counter()
    if (app == "mftsp" and spec.n < 2) or (app == "citsp" and spec.n < 3):
        result = None
    else:
        result = _APP_FUNCS[app](spec.n, oracle, factory)
    wall = time.perf_counter() - t0 - factory.verify_seconds
    stats = result.stats if result is not None else {"oracle_evals": 0, "peak_objects": spec.n}
    return RunRow(BACKENDS[backend].name if isinstance(backend, str) else backend.name,
                  app, spec.kind, spec.resolved_metric, spec.n, spec.seed, wall,
                  int(stats["oracle_evals"]), int(stats["peak_objects"]), True)


def run_experiment(config: RunConfig) -> list[RunRow]:
    """One row per (size, rep); rep r uses seed ``instance.seed + r``.

    Rows are appended to ``config.output`` in a single write once the sweep
    finishes.  Any verification mismatch raises :class:`VerificationError`.
    """
    config.validate()
    rows = []
    for n in config.sizes:
        for rep in range(config.reps):
            spec = InstanceSpec(**{**asdict(config.instance), "n": n, "seed": config.instance.seed + rep})
            row = run_one(config.backend, config.app, spec, config.verify_max, config.capacity)
            if not row.checks_passed:
                raise VerificationError(
                    f"app={config.app} backend={config.backend} n={n} seed={spec.seed}")
            rows.append(row)
    if config.output:
        write_rows(rows, config.output)
    return rows


def write_rows(rows, output) -> None:
    text = "".join(r.csv_line() + "\n" for r in rows)
    if output == "-":
        sys.stdout.write(",".join(CSV_COLUMNS) + "\n" + text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a") as fh:
        fh.write((",".join(CSV_COLUMNS) + "\n" if new else "") + text)


def read_rows(path) -> list[RunRow]:
    import csv
    out = []
    with open(path) as fh:
        for rec in csv.DictReader(fh):
            out.append(RunRow(rec["backend"], rec["app"], rec["kind"], rec["metric"],
                              int(rec["n"]), int(rec["seed"]), float(rec["wall_seconds"]),
                              int(rec["oracle_evals"]), int(rec["peak_objects"]),
                              rec["checks_passed"] == "true"))
    return out


def doubling_ratios(rows, metric: str = "oracle_evals") -> dict:
    """Mean-of-reps ratio between consecutive sizes, keyed by (backend, app, kind, metric, n)."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in rows:
        groups[(r.backend, r.app, r.kind, r.metric)][r.n].append(getattr(r, metric))
    out = {}
    for key, by_n in groups.items():
        ns = sorted(by_n)
        for lo, hi in zip(ns, ns[1:]):
            a, b = np.mean(by_n[lo]), np.mean(by_n[hi])
            out[key + (hi,)] = b / a if a else math.inf
    return out


# -- command line -------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynpair-bench", description=__doc__.split("\n\n")[0])
    p.add_argument("--backend", default="fp", help="comma-separated: " + ",".join(BACKENDS))
    p.add_argument("--app", default="cluster", choices=APPS)
    p.add_argument("--kind", default="uniform_hypercube", choices=KINDS)
    p.add_argument("--metric", default=None)
    p.add_argument("--dim", type=int, default=20)
    p.add_argument("--negate", action="store_true")
    p.add_argument("--sizes", type=_int_list, default=[])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--verify-max", type=int, default=256)
    p.add_argument("--out", default=None,
                   help=f"CSV path ('-' for stdout); default ${OUT_DIR_ENV}/results.csv, else stdout")
    p.add_argument("--capacity", type=int, default=4096, help="quadtree size limit")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    out = args.out
    if out is None:
        out = os.path.join(os.environ[OUT_DIR_ENV], "results.csv") if os.environ.get(OUT_DIR_ENV) else "-"
    spec = InstanceSpec(kind=args.kind, dim=args.dim, metric=args.metric,
                        negate=args.negate, seed=args.seed)
    configs = [RunConfig(backend=b, app=args.app, instance=spec, reps=args.reps,
                         sizes=args.sizes, output=None, verify_max=args.verify_max,
                         capacity=args.capacity)
               for b in args.backend.split(",") if b]
    rows = []
    try:
        for cfg in configs:
            cfg.validate()
        for cfg in configs:
            rows += run_experiment(cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 1
    except VerificationError as exc:
        log.error("verification failed: %s", exc.reproducer)
        return 2
    try:
        write_rows(rows, out)
    except OSError as exc:
        log.error("cannot write %s: %s", out, exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
