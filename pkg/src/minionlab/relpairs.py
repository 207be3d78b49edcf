"""Relation pairs and their algebra.

A pair holds, per sort, a premise relation (rows an operation may consume)
and a conclusion relation (where images must land).  The generated
relational closure factors as relaxations applied to a relaxation-free
closure, so closure queries are membership tests against tight
representatives; the closure itself keeps only relaxation-maximal
representatives, which is sound because every generating move is monotone
in the relaxation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from . import kernels
from .model import (
    OperationTable,
    SortedSet,
    decode_tuple,
    word_strides,
)
from .ops import OperationSet

MASK_LIMIT = 1 << 20
MINV_BUDGET = 1 << 18
MPOL_BUDGET = 1 << 22

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RelationPair:
    """Per-sort premise/conclusion relations of one arity; rows are stored
    encoded base-|A_s| (big-endian)."""

    domain: SortedSet
    arity: int
    pre: tuple[frozenset[int], ...]
    post: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if len(self.pre) != self.domain.num_sorts or len(self.post) != self.domain.num_sorts:
            raise ValueError("one relation per sort required")
        for s in range(self.domain.num_sorts):
            c = self.domain.size(s)
            limit = c**self.arity if self.arity else 1
            for rel in (self.pre[s], self.post[s]):
                for code in rel:
                    if not 0 <= code < limit:
                        raise ValueError(f"row code {code} out of range at sort {s}")

    def rows(self, s: int, which: str = "pre") -> list[tuple[int, ...]]:
        rel = self.pre[s] if which == "pre" else self.post[s]
        base = max(self.domain.size(s), 1)
        return [decode_tuple(code, base, self.arity) for code in sorted(rel)]


def pair_key(p: RelationPair):
    return (
        p.arity,
        tuple(tuple(sorted(r)) for r in p.pre),
        tuple(tuple(sorted(r)) for r in p.post),
    )


def pair_from_rows(
    a: SortedSet,
    arity: int,
    pre_rows: Sequence[Iterable[Sequence[int]]],
    post_rows: Sequence[Iterable[Sequence[int]]],
) -> RelationPair:
    pre = []
    post = []
    for s in range(a.num_sorts):
        base = max(a.size(s), 1)
        for row_set, acc in ((pre_rows[s], pre), (post_rows[s], post)):
            codes = set()
            for row in row_set:
                row = tuple(row)
                if len(row) != arity or any(not 0 <= v < a.size(s) for v in row):
                    raise ValueError(f"row {row} does not lie in the sort-{s} power")
                code = 0
                for v in row:
                    code = code * base + v
                codes.add(code)
            acc.append(frozenset(codes))
    return RelationPair(a, arity, tuple(pre), tuple(post))


@dataclass(frozen=True)
class RelPairSet:
    domain: SortedSet
    pairs: frozenset[RelationPair]
    arity_bound: int

    def __post_init__(self):
        for p in self.pairs:
            if p.domain != self.domain:
                raise ValueError("pair on a different carrier")
            if p.arity > self.arity_bound:
                raise ValueError("pair arity exceeds the bound")

    def sorted_pairs(self) -> list[RelationPair]:
        return sorted(self.pairs, key=pair_key)

    def __len__(self) -> int:
        return len(self.pairs)


# ---------------------------------------------------------------- diagonals


def all_partitions(m: int) -> tuple[Partition, ...]:
    """Partitions of range(m), canonical (blocks by first element)."""
    if m == 0:
        return ((),)
    results: list[Partition] = []

    def extend(i: int, blocks: list[list[int]]):
        if i == m:
            results.append(tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            extend(i + 1, blocks)
            b.pop()
        blocks.append([i])
        extend(i + 1, blocks)
        blocks.pop()

    extend(0, [])
    return tuple(results)


def diagonal(a: SortedSet, m: int, partition: Partition) -> RelationPair:
    """Tuples constant on every block, both components alike."""
    if sorted(x for b in partition for x in b) != list(range(m)):
        raise ValueError("not a partition of the coordinate set")
    rels = []
    for s in range(a.num_sorts):
        c = a.size(s)
        codes = set()
        for values in itertools.product(range(c), repeat=len(partition)):
            digits = [0] * m
            for b, v in zip(partition, values):
                for pos in b:
                    digits[pos] = v
            code = 0
            base = max(c, 1)
            for d in digits:
                code = code * base + d
            codes.add(code)
        rels.append(frozenset(codes))
    rels = tuple(rels)
    return RelationPair(a, m, rels, rels)


def all_diagonals(a: SortedSet, arity_bound: int) -> list[RelationPair]:
    out = []
    for m in range(arity_bound + 1):
        for part in all_partitions(m):
            out.append(diagonal(a, m, part))
    return out


# ------------------------------------------------------- elementary moves


def _per_sort(p: RelationPair, f) -> RelationPair:
    pre = []
    post = []
    for s in range(p.domain.num_sorts):
        base = max(p.domain.size(s), 1)
        pre.append(frozenset(f(code, base) for code in p.pre[s]))
        post.append(frozenset(f(code, base) for code in p.post[s]))
    return RelationPair(p.domain, p.arity, tuple(pre), tuple(post))


def elem_zeta(p: RelationPair) -> RelationPair:
    """Cyclic rotation (a1,...,am) -> (a2,...,am,a1); identity for m <= 1."""
    m = p.arity
    if m <= 1:
        return p
    return _per_sort(p, lambda code, base: (code % base ** (m - 1)) * base + code // base ** (m - 1))


def elem_tau(p: RelationPair) -> RelationPair:
    """Swap of the first two coordinates; identity for m <= 1."""
    m = p.arity
    if m <= 1:
        return p

    def swap(code: int, base: int) -> int:
        hi = base ** (m - 1)
        lo = base ** (m - 2)
        d0 = code // hi
        d1 = code // lo % base
        return code + (d1 - d0) * hi + (d0 - d1) * lo

    return _per_sort(p, swap)


def elem_pr(p: RelationPair) -> RelationPair:
    """Delete the first coordinate (m >= 1)."""
    m = p.arity
    if m < 1:
        raise ValueError("cannot project a 0-ary pair")
    q = _per_sort(p, lambda code, base: code % base ** (m - 1))
    return RelationPair(p.domain, m - 1, q.pre, q.post)


def elem_prod(p: RelationPair, q: RelationPair) -> RelationPair:
    """Concatenation, componentwise per sort on both components."""
    if p.domain != q.domain:
        raise ValueError("pairs on different carriers")
    pre = []
    post = []
    for s in range(p.domain.num_sorts):
        base = max(p.domain.size(s), 1)
        shift = base**q.arity
        pre.append(frozenset(a * shift + b for a in p.pre[s] for b in q.pre[s]))
        post.append(frozenset(a * shift + b for a in p.post[s] for b in q.post[s]))
    return RelationPair(p.domain, p.arity + q.arity, tuple(pre), tuple(post))


def elem_meet(p: RelationPair, q: RelationPair) -> RelationPair:
    """Same-arity intersection on both components."""
    if p.domain != q.domain or p.arity != q.arity:
        raise ValueError("meet needs equal carriers and arities")
    return RelationPair(
        p.domain,
        p.arity,
        tuple(a & b for a, b in zip(p.pre, q.pre)),
        tuple(a & b for a, b in zip(p.post, q.post)),
    )


def is_relaxation(p: RelationPair, q: RelationPair) -> bool:
    """p relaxes q: premises shrink, conclusions grow."""
    if p.domain != q.domain or p.arity != q.arity:
        return False
    return all(a <= b for a, b in zip(p.pre, q.pre)) and all(
        a >= b for a, b in zip(p.post, q.post)
    )


# ------------------------------------------------------------ preservation


@lru_cache(maxsize=1 << 16)
def _pair_prep(p: RelationPair):
    m = p.arity
    rows = []
    counts = []
    masks = []
    for s in range(p.domain.num_sorts):
        c = p.domain.size(s)
        base = max(c, 1)
        codes = sorted(p.pre[s])
        flat = []
        for code in codes:
            flat.extend(decode_tuple(code, base, m))
        rows.append(tuple(flat))
        counts.append(len(codes))
        size = c**m if m else 1
        if size > MASK_LIMIT:
            masks.append(None)
        else:
            mask = bytearray(size)
            for code in p.post[s]:
                mask[code] = 1
            masks.append(bytes(mask))
    return (m, tuple(rows), tuple(counts), tuple(masks))


def _preserves_big(f: OperationTable, p: RelationPair) -> bool:
    # set-membership fallback when the conclusion mask would be oversized
    m = p.arity
    a = p.domain
    row_lists = [p.rows(s) for s in range(a.num_sorts)]
    for s in f.decl.word:
        if not row_lists[s]:
            return True
    post = p.post[f.decl.sort]
    out_size = a.size(f.decl.sort)
    for choice in itertools.product(*(row_lists[s] for s in f.decl.word)):
        code = 0
        for j in range(m):
            code = code * out_size + f.apply([row[j] for row in choice])
        if code not in post:
            return False
    return True


def preserves(f: OperationTable, p: RelationPair) -> bool:
    """True iff every choice of premise rows maps componentwise into the
    conclusion relation of f's output sort."""
    if f.domain != p.domain:
        raise ValueError("operation and pair on different carriers")
    prep = _pair_prep(p)
    if prep[3][f.decl.sort] is None:
        return _preserves_big(f, p)
    return kernels.check_pair(
        f.outputs,
        f.strides,
        f.decl.word,
        f.decl.sort,
        p.domain.size(f.decl.sort),
        prep,
    )


def preserves_all(f: OperationTable, pairs: Iterable[RelationPair]) -> bool:
    return all(preserves(f, p) for p in pairs)


# ------------------------------------------------------------ tight closure


@dataclass(frozen=True)
class TightClosure:
    """Relaxation-maximal representatives of the relaxation-free closure
    under rotation, swap, projection, product, meet and diagonals."""

    representatives: RelPairSet
    truncated: bool
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def member(self, p: RelationPair) -> bool:
        if p.arity > self.representatives.arity_bound:
            raise ValueError("pair arity exceeds the closure bound")
        if p.domain != self.representatives.domain:
            return False
        pre = tuple(_mask_of(r) for r in p.pre)
        post = tuple(_mask_of(r) for r in p.post)
        for rpre, rpost in self._index.get(p.arity, ()):
            if all(a & ~b == 0 for a, b in zip(pre, rpre)) and all(
                b & ~a == 0 for a, b in zip(post, rpost)
            ):
                return True
        return False


# The closure worklist runs on packed records (arity, pre bitmasks, post
# bitmasks) rather than RelationPair objects: subsumption is then two integer
# mask tests and a meet a single AND, which is what makes closures at arity
# bound 2k affordable.  The saturation itself lives in the kernel backends.


def _mask_of(rel: frozenset[int]) -> int:
    m = 0
    for code in rel:
        m |= 1 << code
    return m


@lru_cache(maxsize=512)
def tight_closure(q: RelPairSet) -> TightClosure:
    bound = q.arity_bound
    a = q.domain
    num_sorts = a.num_sorts
    bases = tuple(max(a.size(s), 1) for s in range(num_sorts))

    seeds = [
        (
            p.arity,
            tuple(_mask_of(r) for r in p.pre),
            tuple(_mask_of(r) for r in p.post),
        )
        for p in itertools.chain(q.sorted_pairs(), all_diagonals(a, bound))
    ]
    records = kernels.saturate_masks(num_sorts, bases, bound, seeds)

    reps = []
    index: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
    max_arity = 0
    for m, pre_masks, post_masks in records:
        pre = tuple(frozenset(_mask_codes(pre_masks[s])) for s in range(num_sorts))
        post = tuple(frozenset(_mask_codes(post_masks[s])) for s in range(num_sorts))
        reps.append(RelationPair(a, m, pre, post))
        index.setdefault(m, []).append((tuple(pre_masks), tuple(post_masks)))
        max_arity = max(max_arity, m)
    truncated = bool(reps) and 2 * max_arity > bound
    return TightClosure(RelPairSet(a, frozenset(reps), bound), truncated, index)


def _mask_codes(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mcr_member(p: RelationPair, q: RelPairSet) -> bool:
    """Membership of p in the generated closure of q, within q's arity
    bound: p must relax a tight representative of equal arity."""
    if p.domain != q.domain:
        raise ValueError("pair on a different carrier")
    return tight_closure(q).member(p)


# ------------------------------------------------------------- mpol / minv


def mpol(q: RelPairSet, arity_bound: int, budget: int = MPOL_BUDGET) -> OperationSet:
    """All operations of arity <= arity_bound preserving every pair of q.
    Refuses (error) when the candidate count exceeds the budget."""
    a = q.domain
    from .model import enumerate_declarations, enumerate_operations, operation_count

    count = operation_count(a, arity_bound)
    if count > budget:
        raise ValueError(
            f"size limit exceeded: {count} candidate operations, over the budget {budget}"
        )
    pairs = q.sorted_pairs()
    preps = [_pair_prep(p) for p in pairs]
    ops = []

    for decl in enumerate_declarations(a, arity_bound):
        if any(prep[3][decl.sort] is None for prep in preps):
            for f in enumerate_operations(a, decl):
                if preserves_all(f, pairs):
                    ops.append(f)
            continue
        table_len = a.word_count(decl.word)
        strides = word_strides(a.word_sizes(decl.word))
        survivors = kernels.filter_tables(
            table_len, a.size(decl.sort), strides, decl.word, decl.sort, preps
        )
        for outputs in survivors:
            ops.append(OperationTable(a, decl, outputs))
    return OperationSet(a, frozenset(ops), arity_bound)


def _subsets(n: int) -> Iterator[frozenset[int]]:
    for bits in range(1 << n):
        yield frozenset(i for i in range(n) if bits >> i & 1)


def minv_count(a: SortedSet, arity_bound: int) -> int:
    total = 0
    for m in range(arity_bound + 1):
        per_component = 1
        for s in range(a.num_sorts):
            per_component *= 1 << (a.size(s) ** m if m else 1)
        total += per_component * per_component
    return total


def enumerate_pairs(a: SortedSet, m: int) -> Iterator[RelationPair]:
    """Every m-ary pair, canonical order (premise outer, conclusion inner)."""
    sizes = [a.size(s) ** m if m else 1 for s in range(a.num_sorts)]
    components = [list(_subsets(k)) for k in sizes]
    for pre in itertools.product(*components):
        for post in itertools.product(*components):
            yield RelationPair(a, m, tuple(pre), tuple(post))


def minv(fs: OperationSet, arity_bound: int, budget: int = MINV_BUDGET) -> RelPairSet:
    """All pairs of arity <= arity_bound preserved by every operation of fs.
    Enumeration form: refuses (error) when the pair count exceeds the
    budget; use minv_member for the predicate form."""
    a = fs.domain
    count = minv_count(a, arity_bound)
    if count > budget:
        raise ValueError(
            f"pair universe has {count} members, over the budget {budget}; use minv_member"
        )
    ops = fs.sorted_ops()
    pairs = []
    for m in range(arity_bound + 1):
        for p in enumerate_pairs(a, m):
            if all(preserves(f, p) for f in ops):
                pairs.append(p)
    return RelPairSet(a, frozenset(pairs), arity_bound)


def minv_member(p: RelationPair, fs: OperationSet) -> bool:
    return all(preserves(f, p) for f in fs.sorted_ops())
