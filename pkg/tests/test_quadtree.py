import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import check_against_brute, explicit, random_matrix
from dynpair import CapacityError, MatrixOracle, QuadTree, VectorOracle
from dynpair.quadtree import levels_for


def test_second_insert_sets_root():
    s = QuadTree(explicit({(0, 1): 2.5}, 2))
    s.insert(0)
    s.insert(1)
    assert s.vals[levels_for(2)][0, 0] == 2.5
    assert tuple(s.closest_pair()) in {(0, 1, 2.5), (1, 0, 2.5)}


def test_insert_into_three_touches_few_cells():
    o = MatrixOracle(random_matrix(4, 0))
    s = QuadTree(o)
    s.build(range(3))
    before = o.evals
    s.insert(3)
    assert o.evals - before == 3
    assert s.last_touched <= 2 * 4


def test_root_names_min_slots():
    o = explicit({(0, 1): 5, (0, 2): 6, (0, 3): 4, (1, 2): 7, (1, 3): 1, (2, 3): 8}, 4)
    s = QuadTree(o)
    s.build(range(4))
    rep = s.closest_pair()
    assert {rep.a, rep.b} == {1, 3} and rep.d == 1


def test_delete_last_slot_does_not_renumber():
    s = QuadTree(MatrixOracle(random_matrix(5, 1)))
    s.build(range(5))
    s.delete(4)
    assert s.handle_of == [0, 1, 2, 3]


def test_delete_slot_zero_moves_last():
    s = QuadTree(MatrixOracle(random_matrix(3, 2)))
    s.build(range(3))
    s.delete(0)
    assert s.handle_of == [2, 1] and s.slot_of == {2: 0, 1: 1}
    check_against_brute(s)
    assert s.audit() == []


def test_update_distance_unique_min_to_inf():
    o = explicit({(0, 1): 1, (0, 2): 2, (1, 2): 3, (0, 3): 4, (1, 3): 5, (2, 3): 6}, 4)
    s = QuadTree(o)
    s.build(range(4))
    o.set_infinite(0, 1)
    s.update_distance(0, 1)
    assert s.closest_pair().d == 2


def test_update_non_minimal_pair_keeps_root():
    m = random_matrix(8, 3)
    o = MatrixOracle(m)
    s = QuadTree(o)
    s.build(range(8))
    root = s.closest_pair()
    a, b = (2, 5) if {root.a, root.b} != {2, 5} else (1, 6)
    o.matrix[a, b] = o.matrix[b, a] = 10.0
    s.update_distance(a, b)
    after = s.closest_pair()
    assert {after.a, after.b} == {root.a, root.b} and after.d == root.d


def test_random_updates_log_touches():
    rng = np.random.default_rng(7)
    o = MatrixOracle(random_matrix(64, 7))
    s = QuadTree(o)
    s.build(range(64))
    for _ in range(50):
        a, b = (int(v) for v in rng.choice(64, 2, replace=False))
        o.matrix[a, b] = o.matrix[b, a] = rng.random() * 2
        s.update_distance(a, b)
        assert s.last_touched <= math.ceil(math.log2(64)) + 1
        check_against_brute(s)
    assert s.audit() == []


def test_hundred_inserts_track_root():
    rng = np.random.default_rng(8)
    s = QuadTree(VectorOracle(rng.random((100, 3))))
    for h in range(100):
        s.insert(h)
        assert s.last_touched <= 2 * len(s)
        check_against_brute(s)


def test_delete_closest_loop_200_touches():
    rng = np.random.default_rng(200)
    o = VectorOracle(rng.random((200, 5)))
    s = QuadTree(o)
    s.build(range(200))
    while len(s) >= 2:
        n = len(s)
        rep = s.closest_pair()
        check_against_brute(s)
        s.delete(rep.a)
        assert s.last_touched <= 4 * n + 8
        s.delete(rep.b)
        assert s.last_touched <= 4 * (n - 1) + 8


@pytest.mark.parametrize("n", [1, 2, 3, 5, 17, 64, 100, 513, 1000, 4095])
def test_cell_count_bound(n):
    s = QuadTree(MatrixOracle(np.zeros((1, 1))))
    s.handle_of = list(range(n))  # only n matters for the count
    assert s.cell_count() <= 2 * n * n / 3 + 2 * n


def test_capacity_limit():
    s = QuadTree(MatrixOracle(random_matrix(6, 0)), max_capacity=4)
    s.build(range(4))
    with pytest.raises(CapacityError):
        s.insert(4)
    assert 4 not in s and len(s) == 4
    check_against_brute(s)


def test_all_infinite_root_names_live_handles():
    o = MatrixOracle(random_matrix(3, 0))
    s = QuadTree(o)
    s.build(range(3))
    for a, b in ((0, 1), (0, 2), (1, 2)):
        o.set_infinite(a, b)
        s.invalidate_pair(a, b)
    rep = s.closest_pair()
    assert rep.d == math.inf and {rep.a, rep.b} <= {0, 1, 2} and rep.a != rep.b


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.lists(st.booleans(), min_size=1, max_size=80))
def test_audit_after_every_op(seed, script):
    rng = np.random.default_rng(seed)
    o = MatrixOracle(random_matrix(64 + len(script), seed))
    s = QuadTree(o)
    s.build(range(int(rng.integers(0, 64))))
    fresh = 64
    for ins in script:
        if (ins or len(s) < 2) and len(s) < 64:
            s.insert(fresh)
            fresh += 1
        elif len(s):
            s.delete(int(rng.choice(s.handles())))
        assert s.audit() == []
        check_against_brute(s)
