from __future__ import annotations

import itertools

import pytest

from helpers import BOOL, bool_op, two_sorted
from minionlab.model import (
    Declaration,
    OperationTable,
    ReflectionMap,
    SortedMapping,
    SortedSet,
    all_words,
    build_operation,
    decode_tuple,
    encode_tuple,
    enumerate_declarations,
    enumerate_operations,
    enumerate_tuples,
    identity_reflection,
    is_reasonable,
    operation_count,
    operation_key,
    power_carrier,
    reflection_exists,
    validate_operation,
    word_strides,
)


def test_sorted_set_basics():
    a = two_sorted(("x", "y"), ("z",))
    assert a.num_sorts == 2
    assert a.sizes == (2, 1)
    assert a.size(0) == 2 and a.size(1) == 1
    assert a.essential == frozenset({0, 1})
    assert a.sort_index("w") == 1
    assert a.element_index(0, "y") == 1
    assert a.word_sizes((0, 1, 0)) == (2, 1, 2)
    assert a.word_count((0, 1, 0)) == 4
    assert a.word_count(()) == 1


def test_essential_excludes_empty_carriers():
    a = two_sorted(("0", "1"), ())
    assert a.essential == frozenset({0})
    assert a.word_count((1,)) == 0


def test_sorted_set_rejects_misaligned_carriers():
    with pytest.raises(ValueError):
        SortedSet(("u", "w"), (("0",),))


def test_all_words_order():
    words = list(all_words(2, 2))
    assert words == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]


def test_encode_decode_roundtrip():
    for base in (2, 3):
        for m in range(4):
            for digits in itertools.product(range(base), repeat=m):
                code = encode_tuple(digits, base)
                assert decode_tuple(code, base, m) == digits
    assert encode_tuple((1, 0), 2) == 2


def test_enumerate_tuples_matches_encoding():
    a = two_sorted()
    word = (0, 1, 0)
    for i, args in enumerate(enumerate_tuples(a, word)):
        strides = word_strides(a.word_sizes(word))
        assert sum(v * s for v, s in zip(args, strides)) == i


def test_is_reasonable():
    a = two_sorted(("0", "1"), ())
    assert is_reasonable(a, Declaration((0,), 0))
    assert not is_reasonable(a, Declaration((0,), 1))
    assert is_reasonable(a, Declaration((1,), 1))
    assert is_reasonable(a, Declaration((1,), 0))


def test_operation_table_validation():
    with pytest.raises(ValueError):
        OperationTable(BOOL, Declaration((0,), 0), (0,))
    with pytest.raises(ValueError):
        OperationTable(BOOL, Declaration((0,), 0), (0, 2))
    b = two_sorted(("0", "1"), ())
    with pytest.raises(ValueError):
        OperationTable(b, Declaration((0,), 1), (0, 0))


def test_apply_matches_rows():
    f = bool_op(2, lambda x, y: x | y)
    for args, out in f.rows():
        assert f.apply(args) == out
    assert f.arity == 2
    assert not f.is_empty


def test_empty_operation():
    a = two_sorted(("0", "1"), ())
    f = OperationTable(a, Declaration((1,), 1), ())
    assert f.is_empty
    assert list(f.rows()) == []


def test_build_operation_happy_path():
    entries = [((x, y), x & y) for x in range(2) for y in range(2)]
    v = build_operation(BOOL, Declaration((0, 0), 0), entries)
    assert v.ok and not v.issues
    assert v.operation.outputs == (0, 0, 0, 1)
    assert validate_operation(v.operation).ok


def test_build_operation_diagnostics():
    decl = Declaration((0, 0), 0)
    v = build_operation(BOOL, decl, [((0, 0), 0)])
    assert not v.ok and "missing input" in v.issues[0]
    v = build_operation(BOOL, decl, [((0, 0), 0), ((0, 0), 1)])
    assert not v.ok and "conflicting outputs" in v.issues[0]
    v = build_operation(BOOL, decl, [((0, 0), 2)])
    assert not v.ok and "outside the output carrier" in v.issues[0]
    v = build_operation(BOOL, decl, [((0, 3), 0)])
    assert not v.ok and "does not lie in the input product" in v.issues[0]
    b = two_sorted(("0", "1"), ())
    v = build_operation(b, Declaration((0,), 1), [])
    assert not v.ok and "not reasonable" in v.issues[0]


def test_enumerate_operations_counts():
    assert len(list(enumerate_operations(BOOL, Declaration((0, 0), 0)))) == 16
    assert len(list(enumerate_operations(BOOL, Declaration((0,), 0)))) == 4
    assert len(list(enumerate_operations(BOOL, Declaration((), 0)))) == 2
    total = sum(
        len(list(enumerate_operations(BOOL, d)))
        for d in enumerate_declarations(BOOL, 2)
    )
    assert total == 22
    assert operation_count(BOOL, 2) == 22


def test_enumerate_operations_empty_input():
    a = two_sorted(("0", "1"), ())
    ops = list(enumerate_operations(a, Declaration((1,), 0)))
    assert len(ops) == 1 and ops[0].is_empty


def test_operation_count_closed_form():
    four = SortedSet(("v",), (("0", "1", "2", "3"),))
    assert operation_count(four, 1) == 4 + 4**4
    assert operation_count(four, 2) == 4 + 4**4 + 4**16


def test_operation_key_is_injective_per_domain():
    keys = set()
    for d in enumerate_declarations(BOOL, 2):
        for f in enumerate_operations(BOOL, d):
            keys.add(operation_key(f))
    assert len(keys) == 22


def test_sorted_mapping():
    a = two_sorted()
    m = SortedMapping(a, a, ((1, 0), None))
    assert m.defined(0) and not m.defined(1)
    assert m.image(0, 0) == 1
    with pytest.raises(ValueError):
        m.image(1, 0)
    with pytest.raises(ValueError):
        SortedMapping(a, a, ((0,), None))


def test_reflection_exists():
    a = two_sorted(("0", "1"), ("0",))
    b = two_sorted(("0",), ())
    assert reflection_exists(a, b)
    assert not reflection_exists(b, a)


def test_reflection_map_validation():
    a = two_sorted(("0", "1"), ())
    b = two_sorted(("0",), ())
    r = ReflectionMap(a, b, ((0,), None), ((0, 0), None))
    assert r.h[0] == (0,)
    c = two_sorted(("0",), ("0",))
    with pytest.raises(ValueError, match="no reflections exist"):
        ReflectionMap(a, c, ((0,), (0,)), ((0, 0), (0,)))
    with pytest.raises(ValueError):
        ReflectionMap(a, b, ((0,), (0,)), ((0, 0), None))
    with pytest.raises(ValueError):
        ReflectionMap(a, b, ((2,), None), ((0, 0), None))
    with pytest.raises(ValueError):
        ReflectionMap(a, b, ((0,), None), ((0,), None))


def test_identity_reflection():
    r = identity_reflection(BOOL)
    assert r.h == ((0, 1),) and r.hp == ((0, 1),)
    a = two_sorted(("0", "1"), ())
    r = identity_reflection(a)
    assert r.h[1] is None and r.hp[1] is None


def test_power_carrier():
    sq = power_carrier(BOOL, 2)
    assert sq.sizes == (4,)
    assert sq.carriers[0] == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
    assert power_carrier(BOOL, 1) == BOOL
    with pytest.raises(ValueError):
        power_carrier(BOOL, 0)
