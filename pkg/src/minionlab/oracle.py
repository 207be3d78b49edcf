"""Definition-literal cross-checks for the optimized modules.

Everything here recomputes results from first principles: row scans via
itertools, closures as plain fixpoints with relaxations materialized,
constructibility by exhaustively enumerating powers and reflections.  Only
the data types are shared with the main modules; move tables are memoized
(they are pure functions) but no algorithmic shortcut of the optimized
code is reused.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

from .model import (
    Declaration,
    OperationTable,
    SortedSet,
    enumerate_declarations,
    enumerate_operations,
    enumerate_tuples,
    power_carrier,
    reflection_exists,
)
from .ops import OperationSet
from .relpairs import RelationPair, RelPairSet, all_partitions, pair_from_rows


@dataclass(frozen=True)
class OracleConfig:
    """Hard size limits.  Everything below is a full enumeration, so refuse
    instances that cannot be swept in seconds."""

    max_carrier: int = 2
    max_arity: int = 3
    max_k: int = 2
    max_reflections: int = 1 << 22


def _guard(a: SortedSet, arity_bound: int, cfg: OracleConfig) -> None:
    if arity_bound > cfg.max_arity:
        raise ValueError(f"size limit exceeded: arity bound {arity_bound} > {cfg.max_arity}")
    for s in range(a.num_sorts):
        if a.size(s) > cfg.max_carrier:
            raise ValueError(f"size limit exceeded: carrier of sort {s} has {a.size(s)} elements")


def naive_preserves(f: OperationTable, p: RelationPair) -> bool:
    """Literal quantifier scan over premise row choices."""
    m = p.arity
    rows = [p.rows(s, "pre") for s in range(p.domain.num_sorts)]
    post = set(p.rows(f.decl.sort, "post"))
    for choice in itertools.product(*(rows[s] for s in f.decl.word)):
        image = tuple(f.apply([row[j] for row in choice]) for j in range(m))
        if image not in post:
            return False
    return True


def naive_mpol(q: RelPairSet, arity_bound: int, cfg: OracleConfig = OracleConfig()) -> OperationSet:
    a = q.domain
    _guard(a, arity_bound, cfg)
    pairs = q.sorted_pairs()
    ops = []
    for decl in enumerate_declarations(a, arity_bound):
        for f in enumerate_operations(a, decl):
            if all(naive_preserves(f, p) for p in pairs):
                ops.append(f)
    return OperationSet(a, frozenset(ops), arity_bound)


def _naive_pairs(a: SortedSet, m: int) -> Iterator[RelationPair]:
    per_sort = []
    for s in range(a.num_sorts):
        tuples = list(itertools.product(range(a.size(s)), repeat=m))
        per_sort.append([frozenset(c) for r in range(len(tuples) + 1)
                         for c in itertools.combinations(tuples, r)])
    for pre in itertools.product(*per_sort):
        for post in itertools.product(*per_sort):
            yield pair_from_rows(a, m, [sorted(x) for x in pre], [sorted(x) for x in post])


def naive_minv(fs: OperationSet, arity_bound: int, cfg: OracleConfig = OracleConfig()) -> RelPairSet:
    _guard(fs.domain, arity_bound, cfg)
    ops = fs.sorted_ops()
    pairs = []
    for m in range(arity_bound + 1):
        for p in _naive_pairs(fs.domain, m):
            if all(naive_preserves(f, p) for f in ops):
                pairs.append(p)
    return RelPairSet(fs.domain, frozenset(pairs), arity_bound)


# ------------------------------------------------ literal closure fixpoint

# decoded working form: (arity, pre rows per sort, post rows per sort)
class _OPair(NamedTuple):
    m: int
    pre: tuple[frozenset[tuple[int, ...]], ...]
    post: tuple[frozenset[tuple[int, ...]], ...]


def _decode(p: RelationPair) -> _OPair:
    return _OPair(
        p.arity,
        tuple(frozenset(p.rows(s, "pre")) for s in range(p.domain.num_sorts)),
        tuple(frozenset(p.rows(s, "post")) for s in range(p.domain.num_sorts)),
    )


def _encode(a: SortedSet, p: _OPair) -> RelationPair:
    return pair_from_rows(a, p.m, [sorted(x) for x in p.pre], [sorted(x) for x in p.post])


@lru_cache(maxsize=1 << 16)
def _o_rotate(p: _OPair) -> _OPair:
    if p.m <= 1:
        return p
    move = lambda rel: frozenset(t[1:] + t[:1] for t in rel)
    return _OPair(p.m, tuple(map(move, p.pre)), tuple(map(move, p.post)))


@lru_cache(maxsize=1 << 16)
def _o_swap(p: _OPair) -> _OPair:
    if p.m <= 1:
        return p
    move = lambda rel: frozenset((t[1], t[0]) + t[2:] for t in rel)
    return _OPair(p.m, tuple(map(move, p.pre)), tuple(map(move, p.post)))


@lru_cache(maxsize=1 << 16)
def _o_proj(p: _OPair) -> _OPair:
    move = lambda rel: frozenset(t[1:] for t in rel)
    return _OPair(p.m - 1, tuple(map(move, p.pre)), tuple(map(move, p.post)))


@lru_cache(maxsize=1 << 18)
def _o_prod(p: _OPair, q: _OPair) -> _OPair:
    join = lambda r1, r2: frozenset(a + b for a in r1 for b in r2)
    return _OPair(
        p.m + q.m,
        tuple(join(a, b) for a, b in zip(p.pre, q.pre)),
        tuple(join(a, b) for a, b in zip(p.post, q.post)),
    )


@lru_cache(maxsize=1 << 18)
def _o_meet(p: _OPair, q: _OPair) -> _OPair:
    return _OPair(
        p.m,
        tuple(a & b for a, b in zip(p.pre, q.pre)),
        tuple(a & b for a, b in zip(p.post, q.post)),
    )


def _o_relaxations(p: _OPair, a: SortedSet) -> list[_OPair]:
    per_sort_pre = []
    per_sort_post = []
    for s in range(a.num_sorts):
        pre_rows = sorted(p.pre[s])
        subs = [frozenset(c) for r in range(len(pre_rows) + 1)
                for c in itertools.combinations(pre_rows, r)]
        per_sort_pre.append(subs)
        missing = sorted(set(itertools.product(range(a.size(s)), repeat=p.m)) - p.post[s])
        sups = [p.post[s] | frozenset(c) for r in range(len(missing) + 1)
                for c in itertools.combinations(missing, r)]
        per_sort_post.append(sups)
    out = []
    for pre in itertools.product(*per_sort_pre):
        for post in itertools.product(*per_sort_post):
            out.append(_OPair(p.m, tuple(pre), tuple(post)))
    return out


def _o_diagonals(a: SortedSet, bound: int) -> list[_OPair]:
    out = []
    for m in range(bound + 1):
        for partition in all_partitions(m):
            rels = []
            for s in range(a.num_sorts):
                rows = set()
                for values in itertools.product(range(a.size(s)), repeat=len(partition)):
                    row = [0] * m
                    for block, v in zip(partition, values):
                        for pos in block:
                            row[pos] = v
                    rows.add(tuple(row))
                rels.append(frozenset(rows))
            rels = tuple(rels)
            out.append(_OPair(m, rels, rels))
    return out


def naive_mcr(
    q: RelPairSet,
    arity_bound: Optional[int] = None,
    cfg: OracleConfig = OracleConfig(),
) -> RelPairSet:
    """The literal generated closure: every relaxation materialized, plain
    worklist over rotation/swap/projection/product/meet, diagonals seeded,
    products over the arity bound dropped."""
    a = q.domain
    bound = q.arity_bound if arity_bound is None else arity_bound
    _guard(a, bound, cfg)
    members: set[_OPair] = set()
    queue: list[_OPair] = []

    def add(p: _OPair):
        if p.m <= bound and p not in members:
            members.add(p)
            queue.append(p)

    for p in q.sorted_pairs():
        add(_decode(p))
    for d in _o_diagonals(a, bound):
        add(d)

    while queue:
        p = queue.pop()
        if p.m >= 1:
            add(_o_rotate(p))
            add(_o_swap(p))
            add(_o_proj(p))
        for r in _o_relaxations(p, a):
            add(r)
        for r in list(members):
            if p.m + r.m <= bound:
                add(_o_prod(p, r))
                add(_o_prod(r, p))
            if p.m == r.m:
                add(_o_meet(p, r))
    return RelPairSet(a, frozenset(_encode(a, p) for p in members), bound)


# ------------------------------------------- exhaustive construct search


@dataclass(frozen=True)
class OracleVerdicts:
    extension: bool
    reflection: bool
    power_by_k: tuple[bool, ...]
    er: bool
    rp: bool
    erp: bool

    @property
    def power(self) -> bool:
        return any(self.power_by_k)


def _reflect_table(f: OperationTable, b: SortedSet, h, hp) -> Optional[OperationTable]:
    """Literal h'(f(h(...))) table; None when undefined (unreasonable decl)."""
    decl = f.decl
    if b.carriers[decl.sort] == () and b.word_count(decl.word) > 0:
        return None
    if b.word_count(decl.word) == 0:
        return OperationTable(b, decl, ())
    outputs = []
    for args in enumerate_tuples(b, decl.word):
        v = f.apply([h[s][x] for s, x in zip(decl.word, args)])
        outputs.append(hp[decl.sort][v])
    return OperationTable(b, decl, tuple(outputs))


@lru_cache(maxsize=1 << 14)
def _power_table(f: OperationTable, k: int) -> OperationTable:
    if k == 1:
        return f
    a = f.domain
    b = power_carrier(a, k)
    decl = f.decl
    # power_carrier lists k-tuples in product order, so index <-> tuple maps
    # can be tabulated without touching the arithmetic encoding
    tuple_of = [list(itertools.product(range(a.size(s)), repeat=k)) for s in range(a.num_sorts)]
    index_of = [{t: i for i, t in enumerate(ts)} for ts in tuple_of]
    outputs = []
    for args in enumerate_tuples(b, decl.word):
        combos = [tuple_of[s][idx] for s, idx in zip(decl.word, args)]
        out_combo = tuple(f.apply([c[l] for c in combos]) for l in range(k))
        outputs.append(index_of[decl.sort][out_combo])
    return OperationTable(b, decl, tuple(outputs))


def all_reflections(a: SortedSet, b: SortedSet) -> Iterator[tuple]:
    """All (h, h') of a into b as per-sort map tuples, h outer, lexicographic."""
    if not reflection_exists(a, b):
        return
    sorts = range(b.num_sorts)
    h_choices = [
        [None] if b.size(s) == 0 else [t for t in itertools.product(range(a.size(s)), repeat=b.size(s))]
        for s in sorts
    ]
    hp_choices = [
        [None] if b.size(s) == 0 else [t for t in itertools.product(range(b.size(s)), repeat=a.size(s))]
        for s in sorts
    ]
    for h in itertools.product(*h_choices):
        for hp in itertools.product(*hp_choices):
            yield h, hp


def count_reflections(a: SortedSet, b: SortedSet) -> int:
    if not reflection_exists(a, b):
        return 0
    n = 1
    for s in range(b.num_sorts):
        if b.size(s):
            n *= a.size(s) ** b.size(s) * b.size(s) ** a.size(s)
    return n


@lru_cache(maxsize=1 << 15)
def _reflect_image(m_ops: frozenset[OperationTable], b: SortedSet, h, hp):
    image = set()
    for f in m_ops:
        g = _reflect_table(f, b, h, hp)
        if g is None:
            return None
        image.add(g)
    return frozenset(image)


def exhaustive_erp_search(
    m1: OperationSet, m2: OperationSet, cfg: OracleConfig = OracleConfig()
) -> OracleVerdicts:
    """Ground-truth verdicts by direct enumeration of powers and reflections."""
    a, b = m1.domain, m2.domain
    if a.sorts != b.sorts:
        raise ValueError("verdicts need a shared sort list")
    _guard(a, m1.arity_bound, cfg)
    _guard(b, m2.arity_bound, cfg)
    extension = a == b and m1.ops <= m2.ops
    power_by_k = []
    for k in range(1, cfg.max_k + 1):
        power_by_k.append(b == power_carrier(a, k)
                          and m2.ops == frozenset(_power_table(f, k) for f in m1.ops))
    reflection = False
    er = False
    rp = False
    erp = False
    for k in range(1, cfg.max_k + 1):
        ak = power_carrier(a, k)
        if count_reflections(ak, b) > cfg.max_reflections:
            raise ValueError("size limit exceeded: too many reflections to sweep")
        powered = frozenset(_power_table(f, k) for f in m1.ops)
        for h, hp in all_reflections(ak, b):
            image = _reflect_image(powered, b, h, hp)
            if image is None:
                continue
            if image == m2.ops:
                rp = True
                if k == 1:
                    reflection = True
            if image <= m2.ops:
                erp = True
                if k == 1:
                    er = True
    return OracleVerdicts(extension, reflection, tuple(power_by_k), er, rp, erp)
