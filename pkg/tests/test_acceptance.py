"""Headline criteria.  Each test prints one PASS/FAIL line (also repeated in the terminal summary)."""

import math
import random
import time

import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from conftest import ALL_BACKENDS, random_matrix, record
from dynpair import CongaLine, FastPair, MatrixOracle, MultiConga, QuadTree, VectorOracle, make_backend
from dynpair.applications import (
    agglomerate,
    cheapest_insertion_tsp,
    greedy_matching,
    multifragment_tsp,
    reference_cheapest_insertion,
    reference_greedy_matching,
    reference_multifragment,
)
from dynpair.bench import RunConfig, doubling_ratios, run_experiment
from dynpair.conga import default_k_limit
from dynpair.generators import InstanceSpec, materialize

pytestmark = pytest.mark.acceptance

# FastPair vs neighbor heuristic totals, collected across the workloads below
DOMINANCE: list[tuple[str, int, int]] = []


class Shadow:
    """Independent brute force: a private copy of the matrix with invalidated pairs set to inf."""

    def __init__(self, m: np.ndarray):
        self.m = m.copy()
        np.fill_diagonal(self.m, np.inf)

    def kill(self, a, b):
        self.m[a, b] = self.m[b, a] = np.inf

    def min(self, live) -> float:
        live = np.asarray(live)
        return float(self.m[np.ix_(live, live)].min()) if len(live) >= 2 else None


def run_equivalence_workload(backend: str, seed: int) -> bool:
    """Interleaved insert/delete/invalidate, n <= 256, checked after every operation."""
    rng = random.Random(seed)
    ops, n_max = 150, 256
    m = random_matrix(n_max + ops, seed)
    oracle, shadow = MatrixOracle(m), Shadow(m)
    s = make_backend(backend, oracle)
    start = rng.randrange(0, 200)
    s.build(range(start))
    fresh = start
    for _ in range(ops):
        live = s.handles()
        r = rng.random()
        if len(live) < 2 or (r < 0.4 and len(live) < n_max):
            s.insert(fresh)
            fresh += 1
        elif r < 0.75:
            s.delete(rng.choice(live))
        else:
            a, b = rng.sample(live, 2)
            oracle.set_infinite(a, b)
            shadow.kill(a, b)
            s.invalidate_pair(a, b)
        rep = s.closest_pair()
        want = shadow.min(s.handles())
        got = None if rep is None else rep.d
        if got != want:
            return False
        if rep is not None and shadow.m[rep.a, rep.b] != rep.d:
            return False
    if backend in ("fp", "nh"):
        DOMINANCE.append((f"mixed seed={seed}", backend, oracle.evals))
    return True


def test_oracle_equivalence():
    t0 = time.perf_counter()
    bad = [(b, seed) for b in ALL_BACKENDS for seed in range(100) if not run_equivalence_workload(b, seed)]
    secs = time.perf_counter() - t0
    ok = not bad and secs < 300
    record("oracle equivalence: 6 backends x 100 workloads, exact", ok,
           f"{600 - len(bad)}/600 exact, {secs:.0f}s" + (f", first failure {bad[0]}" if bad else ""))
    assert ok


def test_delete_closest_pair_stress():
    bad, steps = [], 0
    for seed in range(20):
        pts = np.random.default_rng(seed).random((256, 20))
        shadow = Shadow(materialize(VectorOracle(pts), 256))
        for b in ALL_BACKENDS:
            o = VectorOracle(pts)
            s = make_backend(b, o)
            s.build(range(256))
            while len(s) >= 2:
                rep = s.closest_pair()
                if rep.d != shadow.min(s.handles()):
                    bad.append((b, seed, len(s)))
                    break
                s.delete(rep.a)
                s.delete(rep.b)
                steps += 1
            if b in ("fp", "nh"):
                DOMINANCE.append((f"stress seed={seed}", b, o.evals))
    ok = not bad
    record("delete-closest-pair stress: n=256, 20 seeds, all backends", ok,
           f"{steps} steps" + (f", failures {bad[:3]}" if bad else ""))
    assert ok


def _prim(D):
    n = len(D)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    best, out = D[0].copy(), []
    for _ in range(n - 1):
        cand = np.where(seen, np.inf, best)
        j = int(np.argmin(cand))
        out.append(cand[j])
        seen[j] = True
        best = np.minimum(best, D[j])
    return np.sort(out)


def test_single_linkage_equals_mst():
    failures = []
    for seed in range(5):
        rng = np.random.default_rng(seed)
        grid = rng.integers(0, 100, size=(300, 2)).astype(float)
        flt = rng.random((300, 6))
        for pts, metric, exact in ((grid, "l1", True), (flt, "l2", False)):
            want = _prim(squareform(pdist(pts, "cityblock" if metric == "l1" else "euclidean")))
            for b in ALL_BACKENDS:
                got = np.sort(agglomerate(300, VectorOracle(pts, metric), "single", b).heights())
                same = np.array_equal(got, want) if exact else np.allclose(got, want, rtol=1e-9, atol=0)
                if not same:
                    failures.append((seed, metric, b))
    ok = not failures
    record("single linkage == MST: exact on integer grids, rel 1e-9 on floats, n=300", ok,
           "60 comparisons" + (f", failures {failures[:3]}" if failures else ""))
    assert ok


def _perfect_matchings(items):
    if not items:
        yield []
        return
    a, rest = items[0], items[1:]
    for i, b in enumerate(rest):
        for tail in _perfect_matchings(rest[:i] + rest[i + 1:]):
            yield [(a, b)] + tail


def test_application_cross_validation():
    failures, n = [], 200
    for seed in range(20):
        pts = np.random.default_rng(1000 + seed).random((n, 2))
        d = pdist(pts)
        assert len(np.unique(d)) == len(d), "instance has tied distances; regenerate"
        o = VectorOracle(pts)
        mf_ref = reference_multifragment(n, o).edges()
        ci_ref = reference_cheapest_insertion(n, o)
        gm_ref = reference_greedy_matching(n, o).pair_set()
        for b in ALL_BACKENDS:
            if multifragment_tsp(n, o, b).edges() != mf_ref:
                failures.append(("mftsp", seed, b))
            if cheapest_insertion_tsp(n, o, b).insertions != ci_ref.insertions:
                failures.append(("citsp", seed, b))
            m = greedy_matching(n, o, b)
            if m.pair_set() != gm_ref:
                failures.append(("match", seed, b))
            if b in ("fp", "nh"):
                DOMINANCE.append((f"match seed={seed}", b, m.stats["oracle_evals"]))
    lex_checked = 0
    for n_small in (2, 4, 6, 8):
        for seed in range(10):
            o = VectorOracle(np.random.default_rng(n_small * 100 + seed).random((n_small, 2)))
            best = min(sorted(o.peek(a, b) for a, b in pm) for pm in _perfect_matchings(list(range(n_small))))
            for b in ALL_BACKENDS:
                lex_checked += 1
                if greedy_matching(n_small, o, b).weights() != best:
                    failures.append(("lexmin", n_small, seed, b))
    ok = not failures
    record("application cross-validation: mftsp/citsp/matching vs references, 20 seeds n=200; lexmin n<=8", ok,
           f"{20 * 6 * 3} app runs, {lex_checked} exhaustive checks" + (f", failures {failures[:3]}" if failures else ""))
    assert ok


def test_quadtree_bounds():
    problems = []
    for n in range(1, 4097):
        qt = QuadTree(MatrixOracle(np.zeros((1, 1))))
        qt.handle_of = list(range(n))
        if qt.cell_count() > 2 * n * n / 3 + 2 * n:
            problems.append(("cells", n))
    rng = np.random.default_rng(0)
    for seed in range(5):
        m = random_matrix(400, seed)
        o = MatrixOracle(m)
        s = QuadTree(o)
        for h in range(200):
            s.insert(h)
            if s.last_touched > 2 * len(s):
                problems.append(("insert", seed, len(s), s.last_touched))
        for _ in range(100):
            a, b = (int(v) for v in rng.choice(s.handles(), 2, replace=False))
            o.matrix[a, b] = o.matrix[b, a] = rng.random()
            s.update_distance(a, b)
            if s.last_touched > math.ceil(math.log2(len(s))) + 1:
                problems.append(("update", seed, s.last_touched))
        small = QuadTree(MatrixOracle(random_matrix(300, seed)))
        fresh = 0
        for step in range(250):
            if len(small) < 2 or (rng.random() < 0.55 and len(small) < 64):
                small.insert(fresh)
                fresh += 1
            elif rng.random() < 0.8:
                small.delete(int(rng.choice(small.handles())))
            else:
                a, b = (int(v) for v in rng.choice(small.handles(), 2, replace=False))
                small.oracle.set_infinite(a, b)
                small.invalidate_pair(a, b)
            if small.audit():
                problems.append(("audit", seed, step, small.audit()[0]))
                break
    ok = not problems
    record("quadtree bounds: cells <= 2n^2/3+2n (n<4097), insert <= 2n, update <= ceil(log2 n)+1, audit n<=64",
           ok, f"{len(problems)} violations" + (f", e.g. {problems[0]}" if problems else ""))
    assert ok


def test_conga_bounds():
    problems = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        o = MatrixOracle(random_matrix(1500, seed))
        structs = [CongaLine(o), MultiConga(o), FastPair(o)]
        for s in structs:
            s.build(range(200))
        fresh = 200
        for step in range(600):
            live = structs[0].handles()
            r = rng.random()
            if len(live) < 2 or r < 0.45:
                for s in structs:
                    s.insert(fresh)
                fresh += 1
            elif r < 0.9:
                x = int(rng.choice(live))
                for s in structs:
                    s.delete(x)
            else:
                a, b = (int(v) for v in rng.choice(live, 2, replace=False))
                o.set_infinite(a, b)
                for s in structs:
                    s.invalidate_pair(a, b)
            n = len(structs[0])
            for s in structs[:2]:
                if s.total_edges > 2 * n:
                    problems.append((s.name, seed, step, "edges", s.total_edges, n))
            if len(structs[0].subsets) > max(1, math.ceil(math.log2(n))):
                problems.append(("cl", seed, step, "subsets", len(structs[0].subsets), n))
            if len(structs[2].entries()) != n:
                problems.append(("fp", seed, step, "entries"))
    assert default_k_limit(256) == 8
    ok = not problems
    record("conga bounds: edges <= 2n (cl, mc), subsets <= ceil(log2 n) (cl), fastpair entries == n", ok,
           "10 seeds x 600 ops" + (f", e.g. {problems[0]}" if problems else ""))
    assert ok


def test_scaling_trends():
    ratios = {}
    totals = {}
    for b in ALL_BACKENDS:
        rows = run_experiment(RunConfig(b, "cluster", InstanceSpec(dim=20), reps=5, sizes=[128, 256, 512],
                                        verify_max=0))
        ratios[b] = [round(float(v), 2) for _, v in sorted(doubling_ratios(rows).items(), key=lambda kv: kv[0][-1])]
        totals[b] = {n: sum(r.oracle_evals for r in rows if r.n == n) for n in (128, 256, 512)}
    for n in (128, 256, 512):
        DOMINANCE.append((f"upgma n={n}", "fp", totals["fp"][n]))
        DOMINANCE.append((f"upgma n={n}", "nh", totals["nh"][n]))
    ok_bf = all(6 <= r <= 10 for r in ratios["bf"])
    ok_q = all(3 <= r <= 6 for b in ("cl", "mc", "fp", "qt") for r in ratios[b])
    record("scaling: UPGMA brute-force doubling ratio in [6,10]", ok_bf, f"bf {ratios['bf']}")
    record("scaling: UPGMA cl/mc/fp/qt doubling ratios in [3,6]", ok_q,
           ", ".join(f"{b} {ratios[b]}" for b in ("cl", "mc", "fp", "qt")) + f"; nh {ratios['nh']}")
    assert ok_bf and ok_q


def test_neighbor_heuristic_adversary():
    rows = {}
    for b in ("nh", "fp"):
        rows[b] = run_experiment(RunConfig(b, "star", reps=3, sizes=[64, 128, 256], verify_max=0))
    rn = [round(float(v), 2) for _, v in sorted(doubling_ratios(rows["nh"]).items(), key=lambda kv: kv[0][-1])]
    rf = [round(float(v), 2) for _, v in sorted(doubling_ratios(rows["fp"]).items(), key=lambda kv: kv[0][-1])]
    for n in (64, 128, 256):
        for b in ("nh", "fp"):
            DOMINANCE.append((f"star n={n}", b, sum(r.oracle_evals for r in rows[b] if r.n == n)))
    ok = all(r >= 6 for r in rn) and all(3 <= r <= 6 for r in rf)
    record("star adversary: neighbor heuristic ratio >= 6, fastpair in [3,6]", ok, f"nh {rn}, fp {rf}")
    assert ok


def test_fastpair_never_costlier_than_neighbor_heuristic():
    # runs last in this module; relies on the workloads above having filled DOMINANCE
    by_workload = {}
    for name, b, evals in DOMINANCE:
        by_workload.setdefault(name, {})[b] = evals
    pairs = {w: d for w, d in by_workload.items() if "fp" in d and "nh" in d}
    losses = [w for w, d in pairs.items() if d["fp"] > d["nh"]]
    ok = bool(pairs) and not losses
    info = f"{len(pairs)} workloads, {len(losses)} losses"
    for label, keep in (("benchmark", lambda w: not w.startswith("mixed")),
                        ("mixed", lambda w: w.startswith("mixed"))):
        rs = [d["fp"] / d["nh"] for w, d in pairs.items() if keep(w)]
        if rs:
            info += f"; {label} fp/nh {min(rs):.2f}..{max(rs):.2f}"
    record("fastpair evals <= neighbor-heuristic evals on every acceptance workload", ok,
           info + (f", e.g. {losses[:3]}" if losses else ""))
    assert ok
