"""Shared builders for the test suite: small carriers, named boolean
operations and relation pairs, and seeded random instance generators."""

from __future__ import annotations

import random

from minionlab.model import (
    Declaration,
    OperationTable,
    SortedSet,
    enumerate_declarations,
    enumerate_operations,
    enumerate_tuples,
)
from minionlab.ops import OperationSet
from minionlab.relpairs import RelationPair, RelPairSet, enumerate_pairs, pair_from_rows

BOOL = SortedSet(("v",), (("0", "1"),))


def bool_op(arity: int, fn) -> OperationTable:
    decl = Declaration((0,) * arity, 0)
    outputs = tuple(fn(*args) for args in enumerate_tuples(BOOL, decl.word))
    return OperationTable(BOOL, decl, outputs)


AND = bool_op(2, lambda x, y: x & y)
OR = bool_op(2, lambda x, y: x | y)
XOR = bool_op(2, lambda x, y: x ^ y)
NOT = bool_op(1, lambda x: 1 - x)
IDENT = bool_op(1, lambda x: x)
PROJ1 = bool_op(2, lambda x, y: x)
PROJ2 = bool_op(2, lambda x, y: y)
CONST0 = bool_op(1, lambda x: 0)
CONST1 = bool_op(1, lambda x: 1)
ZERO0 = bool_op(0, lambda: 0)
ZERO1 = bool_op(0, lambda: 1)


def bool_pair(arity: int, pre, post) -> RelationPair:
    return pair_from_rows(BOOL, arity, (pre,), (post,))


LE = bool_pair(2, [(0, 0), (0, 1), (1, 1)], [(0, 0), (0, 1), (1, 1)])
EQ = bool_pair(2, [(0, 0), (1, 1)], [(0, 0), (1, 1)])
FULL2 = bool_pair(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 0), (0, 1), (1, 0), (1, 1)])
FULL_TO_EQ = bool_pair(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [(0, 0), (1, 1)])


def op_set(ops, bound: int = 2, a: SortedSet = BOOL) -> OperationSet:
    return OperationSet(a, frozenset(ops), bound)


def pair_set(pairs, bound: int = 2, a: SortedSet = BOOL) -> RelPairSet:
    return RelPairSet(a, frozenset(pairs), bound)


def two_sorted(c0=("0", "1"), c1=("0", "1")) -> SortedSet:
    return SortedSet(("u", "w"), (tuple(c0), tuple(c1)))


def all_ops(a: SortedSet, arity_bound: int) -> list[OperationTable]:
    out = []
    for decl in enumerate_declarations(a, arity_bound):
        out.extend(enumerate_operations(a, decl))
    return out


def pair_universe(a: SortedSet, arity_bound: int) -> list[RelationPair]:
    return [p for m in range(arity_bound + 1) for p in enumerate_pairs(a, m)]


def random_op(rng: random.Random, a: SortedSet, arity_bound: int) -> OperationTable:
    decls = list(enumerate_declarations(a, arity_bound))
    decl = rng.choice(decls)
    n = a.word_count(decl.word)
    outputs = tuple(rng.randrange(a.size(decl.sort)) for _ in range(n))
    return OperationTable(a, decl, outputs)


def random_pair(rng: random.Random, a: SortedSet, arity: int) -> RelationPair:
    pre, post = [], []
    for s in range(a.num_sorts):
        limit = a.size(s) ** arity if arity else 1
        codes = range(limit)
        pre.append(frozenset(c for c in codes if rng.random() < 0.5))
        post.append(frozenset(c for c in codes if rng.random() < 0.5))
    return RelationPair(a, arity, tuple(pre), tuple(post))
