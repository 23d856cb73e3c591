import math
import random

import numpy as np
import pytest

from dynpair import BACKENDS, FunctionOracle, MatrixOracle, brute_force_min, make_backend

ALL_BACKENDS = sorted(BACKENDS)

# acceptance results, echoed in the terminal summary so they survive output capture
VERDICTS: list[str] = []


def record(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    VERDICTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


def random_matrix(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)), k=1)
    return upper + upper.T


def expected_min(struct):
    """Brute-force minimum over the structure's live set, uncounted."""
    return brute_force_min(struct.oracle, struct.live.array)


def check_against_brute(struct) -> None:
    got, want = struct.closest_pair(), expected_min(struct)
    if want is None:
        assert got is None
        return
    assert got is not None and got.d == want.d, (got, want)
    assert struct.oracle.peek(got.a, got.b) == got.d


def random_workload(backend: str, seed: int, n_max: int = 256, ops: int = 300,
                    invalidate: bool = True) -> int:
    """Interleaved insert/delete/invalidate on a fresh random matrix; returns queries checked."""
    rng = random.Random(seed)
    universe = n_max + ops
    oracle = MatrixOracle(random_matrix(universe, seed))
    struct = make_backend(backend, oracle)
    start = rng.randrange(0, min(n_max, 64))
    struct.build(range(start))
    fresh, checked = start, 0
    for _ in range(ops):
        r = rng.random()
        live = struct.handles()
        if len(live) < 2 or (r < 0.45 and len(live) < n_max and fresh < universe):
            struct.insert(fresh)
            fresh += 1
        elif r < 0.85 or not invalidate:
            struct.delete(rng.choice(live))
        else:
            a, b = rng.sample(live, 2)
            oracle.set_infinite(a, b)
            struct.invalidate_pair(a, b)
        check_against_brute(struct)
        checked += 1
    return checked


def delete_closest_loop(backend: str, oracle, n: int) -> int:
    struct = make_backend(backend, oracle)
    struct.build(range(n))
    steps = 0
    while len(struct) >= 2:
        check_against_brute(struct)
        rep = struct.closest_pair()
        struct.delete(rep.a)
        struct.delete(rep.b)
        steps += 1
    return steps


@pytest.fixture(params=ALL_BACKENDS)
def backend(request):
    return request.param


def line_oracle(xs):
    xs = list(xs)
    return FunctionOracle(lambda a, b: abs(xs[a] - xs[b]))


def explicit(pairs: dict, n: int, default=math.inf):
    m = np.full((n, n), default, dtype=float)
    np.fill_diagonal(m, 0.0)
    for (a, b), d in pairs.items():
        m[a, b] = m[b, a] = d
    return MatrixOracle(m)
