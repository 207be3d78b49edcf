"""Transport of relation pairs along reflections, and the arity regrouping
between a carrier and its finite powers.

Tuples are encoded big-endian, so a km-tuple over A and the corresponding
m-tuple over A^k share one integer code; lift and flatten only rewrite the
(domain, arity) metadata.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .model import ReflectionMap, SortedSet, decode_tuple, encode_tuple, power_carrier
from .relpairs import Partition, RelationPair, RelPairSet


@dataclass(frozen=True)
class PowerSortedSet:
    """A power carrier remembering its base and exponent, so flattening
    knows how to regroup."""

    base: SortedSet
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("power exponent must be >= 1")

    @cached_property
    def carrier(self) -> SortedSet:
        return power_carrier(self.base, self.k)


def _map_digits(code: int, m: int, src_base: int, dst_base: int, table) -> int:
    digits = decode_tuple(code, max(src_base, 1), m)
    return encode_tuple([table[d] for d in digits], max(dst_base, 1))


def reflect_pair(p: RelationPair, r: ReflectionMap) -> RelationPair:
    """Premises pull back along h, conclusions push forward along h';
    sorts empty in the target contribute empty relations."""
    if p.domain != r.a:
        raise ValueError("pair not on the reflection source")
    m = p.arity
    pre = []
    post = []
    for s in range(r.b.num_sorts):
        cb = r.b.size(s)
        if cb == 0:
            pre.append(frozenset())
            post.append(frozenset())
            continue
        ca = r.a.size(s)
        h, hp = r.h[s], r.hp[s]
        pre.append(
            frozenset(
                code
                for code in range(cb**m if m else 1)
                if _map_digits(code, m, cb, ca, h) in p.pre[s]
            )
        )
        post.append(frozenset(_map_digits(code, m, ca, cb, hp) for code in p.post[s]))
    return RelationPair(r.b, m, tuple(pre), tuple(post))


def coreflect_pair(t: RelationPair, r: ReflectionMap) -> RelationPair:
    """Premises push forward along h, conclusions pull back along h';
    sorts empty in B contribute empty relations on A."""
    if t.domain != r.b:
        raise ValueError("pair not on the reflection target")
    m = t.arity
    pre = []
    post = []
    for s in range(r.a.num_sorts):
        cb = r.b.size(s)
        if cb == 0:
            pre.append(frozenset())
            post.append(frozenset())
            continue
        ca = r.a.size(s)
        h, hp = r.h[s], r.hp[s]
        pre.append(frozenset(_map_digits(code, m, cb, ca, h) for code in t.pre[s]))
        post.append(
            frozenset(
                code
                for code in range(ca**m if m else 1)
                if _map_digits(code, m, ca, cb, hp) in t.post[s]
            )
        )
    return RelationPair(r.a, m, tuple(pre), tuple(post))


def lift_pair(p: RelationPair, k: int) -> RelationPair:
    """Regroup a km-ary pair on A as an m-ary pair on A^k (pure metadata)."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    if p.arity % k:
        raise ValueError(f"arity {p.arity} not divisible by {k}")
    if k == 1:
        return p
    return RelationPair(power_carrier(p.domain, k), p.arity // k, p.pre, p.post)


def flatten_pair(t: RelationPair, k: int, base: SortedSet) -> RelationPair:
    """Inverse regrouping: an m-ary pair on A^k as a km-ary pair on A."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    if t.domain != power_carrier(base, k):
        raise ValueError("pair is not on the k-th power of the base carrier")
    if k == 1:
        return t
    return RelationPair(base, t.arity * k, t.pre, t.post)


def lift_set(q: RelPairSet, k: int) -> RelPairSet:
    """Lift of the divisible-arity members."""
    lifted = frozenset(lift_pair(p, k) for p in q.pairs if p.arity % k == 0)
    domain = power_carrier(q.domain, k)
    return RelPairSet(domain, lifted, q.arity_bound // k)


def flatten_set(q: RelPairSet, k: int, base: SortedSet) -> RelPairSet:
    flat = frozenset(flatten_pair(t, k, base) for t in q.pairs)
    return RelPairSet(base, flat, q.arity_bound * k)


def flatten_partition(partition: Partition, m: int, k: int) -> Partition:
    """The coordinate partition matching a flattened diagonal: flat positions
    agree iff their groups agree and they share the in-group offset."""
    blocks = []
    for block in partition:
        for l in range(k):
            blocks.append(tuple(sorted(q * k + l for q in block)))
    blocks.sort(key=lambda b: b[0])
    if sorted(x for b in blocks for x in b) != list(range(m * k)):
        raise AssertionError("partition does not cover the flat coordinates")
    return tuple(blocks)
