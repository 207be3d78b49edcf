from __future__ import annotations

import random

import pytest

from helpers import (
    AND,
    BOOL,
    LE,
    NOT,
    all_ops,
    bool_pair,
    op_set,
    pair_set,
    pair_universe,
    random_pair,
    two_sorted,
)
from minionlab.model import ReflectionMap, SortedSet, identity_reflection, power_carrier
from minionlab.ops import direct_power, reflect_op
from minionlab.reflift import (
    PowerSortedSet,
    coreflect_pair,
    flatten_pair,
    flatten_partition,
    flatten_set,
    lift_pair,
    lift_set,
    reflect_pair,
)
from minionlab.relpairs import (
    all_partitions,
    diagonal,
    is_relaxation,
    minv,
    minv_member,
    preserves,
)


def all_bool_reflections():
    out = []
    for h in ((0, 0), (0, 1), (1, 0), (1, 1)):
        for hp in ((0, 0), (0, 1), (1, 0), (1, 1)):
            out.append(ReflectionMap(BOOL, BOOL, (h,), (hp,)))
    return out


def test_reflect_pair_identity():
    r = identity_reflection(BOOL)
    for p in (LE, bool_pair(0, [()], []), bool_pair(1, [(0,)], [(1,)])):
        assert reflect_pair(p, r) == p
        assert coreflect_pair(p, r) == p


def test_reflect_pair_constant_h():
    r = ReflectionMap(BOOL, BOOL, ((0, 0),), ((0, 1),))
    got = reflect_pair(LE, r)
    # (0,0) is in <=, so the pullback along the constant map is full
    assert got.pre == (frozenset({0, 1, 2, 3}),)
    off_diag = bool_pair(2, [(0, 1), (1, 0)], [])
    assert reflect_pair(off_diag, r).pre == (frozenset(),)


def test_reflect_pair_empty_sort():
    a = two_sorted(("0", "1"), ("0", "1"))
    b = two_sorted(("0", "1"), ())
    r = ReflectionMap(a, b, ((0, 1), None), ((0, 1), None))
    p = random_pair(random.Random(1), a, 2)
    got = reflect_pair(p, r)
    assert got.pre[1] == frozenset() and got.post[1] == frozenset()


def test_coreflect_pullback_can_empty_conclusions():
    # h' is not surjective: nothing maps onto 1, so the pullback of {1} dies
    r = ReflectionMap(BOOL, BOOL, ((0, 1),), ((0, 0),))
    t = bool_pair(1, [], [(1,)])
    got = coreflect_pair(t, r)
    assert got.post == (frozenset(),)


def test_coreflect_of_reflect_is_a_relaxation():
    for r in all_bool_reflections():
        for p in (LE, bool_pair(1, [(0,)], [(0,), (1,)]), bool_pair(0, [()], [()])):
            back = coreflect_pair(reflect_pair(p, r), r)
            assert is_relaxation(back, p)


def test_lift_flatten_roundtrip():
    sq = power_carrier(BOOL, 2)
    for p in (LE, bool_pair(2, [(0, 1)], [(1, 0)])):
        lifted = lift_pair(p, 2)
        assert lifted.domain == sq and lifted.arity == 1
        assert flatten_pair(lifted, 2, BOOL) == p
    t = random_pair(random.Random(3), sq, 1)
    assert lift_pair(flatten_pair(t, 2, BOOL), 2) == t


def test_lift_pair_arity_errors():
    with pytest.raises(ValueError, match="not divisible"):
        lift_pair(bool_pair(1, [(0,)], [(0,)]), 2)
    assert lift_pair(LE, 1) == LE
    sq = power_carrier(BOOL, 2)
    with pytest.raises(ValueError, match="not on the k-th power"):
        flatten_pair(LE, 2, two_sorted())
    assert flatten_pair(LE, 1, BOOL) == LE


def test_lift_set_skips_non_divisible():
    q = pair_set([LE, bool_pair(1, [(0,)], [(0,)])])
    lifted = lift_set(q, 2)
    assert len(lifted.pairs) == 1 and lifted.arity_bound == 1
    only_odd = pair_set([bool_pair(1, [(0,)], [(0,)])])
    assert len(lift_set(only_odd, 2).pairs) == 0


def test_flatten_set_roundtrip():
    q = pair_set([LE, bool_pair(0, [()], [()])])
    lifted = lift_set(q, 2)
    back = flatten_set(lifted, 2, BOOL)
    assert back.pairs == q.pairs and back.arity_bound == 2


def test_flatten_partition_concrete():
    # flat positions agree iff their groups agree and offsets match
    assert flatten_partition(((0,), (1,)), 2, 2) == ((0,), (1,), (2,), (3,))
    assert flatten_partition(((0, 1),), 2, 2) == ((0, 2), (1, 3))
    assert flatten_partition(((0,),), 1, 3) == ((0,), (1,), (2,))


def test_flatten_diagonal_formula():
    sq = power_carrier(BOOL, 2)
    for m in range(3):
        for part in all_partitions(m):
            flat = flatten_pair(diagonal(sq, m, part), 2, BOOL)
            direct = diagonal(BOOL, 2 * m, flatten_partition(part, m, 2))
            assert flat == direct


def test_power_preservation_transfer():
    sq = power_carrier(BOOL, 2)
    rng = random.Random(7)
    for _ in range(60):
        f = rng.choice(all_ops(BOOL, 2))
        t = random_pair(rng, sq, 1)
        assert preserves(direct_power(f, 2), t) == preserves(f, flatten_pair(t, 2, BOOL))


def test_reflection_preservation_transfer():
    rng = random.Random(9)
    ops = all_ops(BOOL, 2)
    for r in all_bool_reflections():
        for _ in range(8):
            f = rng.choice(ops)
            p = random_pair(rng, BOOL, rng.randrange(3))
            if preserves(f, p):
                assert preserves(reflect_op(f, r), reflect_pair(p, r))
            t = random_pair(rng, BOOL, rng.randrange(3))
            if preserves(reflect_op(f, r), t):
                assert preserves(f, coreflect_pair(t, r))


def test_minv_of_reflected_ops_is_relaxed_reflection():
    universe = pair_universe(BOOL, 2)
    fs = op_set([AND, NOT])
    inv = minv(fs, 2)
    for r in all_bool_reflections():
        reflected = op_set([reflect_op(f, r) for f in fs.sorted_ops()])
        got = minv(reflected, 2)
        images = [reflect_pair(p, r) for p in inv.sorted_pairs()]
        want = {p for p in universe if any(is_relaxation(p, img) for img in images)}
        assert got.pairs == want


def test_power_sorted_set():
    ps = PowerSortedSet(BOOL, 2)
    assert ps.carrier == power_carrier(BOOL, 2)
    assert ps.k == 2 and ps.base == BOOL
