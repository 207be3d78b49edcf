"""Operations on operation tables: minors, minor terms, reflections, direct
powers, minor-closure and minion homomorphism search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional

from . import kernels
from .model import (
    Declaration,
    OperationTable,
    ReflectionMap,
    SortedSet,
    Word,
    all_words,
    check_word,
    decode_tuple,
    encode_tuple,
    enumerate_tuples,
    is_reasonable,
    operation_key,
    power_carrier,
    word_strides,
)


@dataclass(frozen=True)
class OperationSet:
    """A finite set of operations on one carrier, all of arity <= arity_bound."""

    domain: SortedSet
    ops: frozenset[OperationTable]
    arity_bound: int

    def __post_init__(self):
        for f in self.ops:
            if f.domain != self.domain:
                raise ValueError("operation on a different carrier")
            if f.arity > self.arity_bound:
                raise ValueError("operation arity exceeds the bound")

    def sorted_ops(self) -> list[OperationTable]:
        return sorted(self.ops, key=operation_key)

    def __contains__(self, f: OperationTable) -> bool:
        return f in self.ops

    def __len__(self) -> int:
        return len(self.ops)


class MinorSpec(NamedTuple):
    """Reindexing data: target word u and, per argument of f, the position in
    u (0-based) it is read from."""

    u: Word
    sigma: tuple[int, ...]


def minor(f: OperationTable, spec: MinorSpec) -> OperationTable:
    """The reindexed operation g(a) = f(a restricted to sigma); sorts at the
    selected positions must match f's input word."""
    a = f.domain
    u = check_word(a, spec.u)
    w = f.decl.word
    if len(spec.sigma) != len(w):
        raise ValueError("one position per argument of f required")
    for i, pos in enumerate(spec.sigma):
        if not 0 <= pos < len(u):
            raise ValueError(f"position {pos} outside the target word")
        if u[pos] != w[i]:
            raise ValueError(
                f"sort mismatch: argument {i} has sort {w[i]} but position {pos} has sort {u[pos]}"
            )
    outputs = kernels.minor_table(f.outputs, f.strides, spec.sigma, a.word_sizes(u))
    return OperationTable(a, Declaration(u, f.decl.sort), tuple(outputs))


@lru_cache(maxsize=4096)
def minor_specs(w: Word, num_sorts: int, arity_bound: int) -> tuple[MinorSpec, ...]:
    """Every (u, sigma) with |u| <= arity_bound applicable to input word w."""
    specs = []
    for u in all_words(num_sorts, arity_bound):
        positions = [[j for j, t in enumerate(u) if t == s] for s in w]
        if any(not p for p in positions):
            continue
        for sigma in itertools.product(*positions):
            specs.append(MinorSpec(u, sigma))
    return tuple(specs)


def all_minors(f: OperationTable, arity_bound: int) -> OperationSet:
    """All minors of f with target arity <= arity_bound (f itself included
    when its arity fits)."""
    found = {}
    for spec in minor_specs(f.decl.word, f.domain.num_sorts, arity_bound):
        g = minor(f, spec)
        found[(g.decl, g.outputs)] = g
    return OperationSet(f.domain, frozenset(found.values()), arity_bound)


def mcf(ops: Iterable[OperationTable], domain: SortedSet, arity_bound: int) -> OperationSet:
    """Minor closure within the bound.  Minors of minors are minors, so one
    pass over the generators is already the fixpoint."""
    found = {}
    for f in ops:
        if f.domain != domain:
            raise ValueError("generator on a different carrier")
        for g in all_minors(f, arity_bound).ops:
            found[(g.decl, g.outputs)] = g
    return OperationSet(domain, frozenset(found.values()), arity_bound)


def is_minor_closed(fs: OperationSet) -> bool:
    for f in fs.sorted_ops():
        for spec in minor_specs(f.decl.word, fs.domain.num_sorts, fs.arity_bound):
            if minor(f, spec) not in fs.ops:
                return False
    return True


def reflect_op(f: OperationTable, r: ReflectionMap) -> OperationTable:
    """The operation b |-> h'(f(h(b))) on B; the empty map when B_w is empty.
    Requires f's declaration to be reasonable in B."""
    if f.domain != r.a:
        raise ValueError("operation not on the reflection source")
    b = r.b
    decl = f.decl
    if not is_reasonable(b, decl):
        raise ValueError("declaration not reasonable in the reflection target")
    if b.word_count(decl.word) == 0:
        return OperationTable(b, decl, ())
    hp = r.hp[decl.sort]
    hs = [r.h[s] for s in decl.word]
    outputs = []
    for args in enumerate_tuples(b, decl.word):
        outputs.append(hp[f.apply([hs[i][v] for i, v in enumerate(args)])])
    return OperationTable(b, decl, tuple(outputs))


def reflect_set(fs: OperationSet, r: ReflectionMap) -> OperationSet:
    """Elementwise reflection; undefined (error) if any declaration is not
    reasonable in the target."""
    for f in fs.sorted_ops():
        if not is_reasonable(r.b, f.decl):
            raise ValueError("reflection undefined: a declaration is not reasonable in the target")
    return OperationSet(r.b, frozenset(reflect_op(f, r) for f in fs.ops), fs.arity_bound)


def direct_power(f: OperationTable, k: int) -> OperationTable:
    """f applied coordinatewise to k-tuples.  Tuple elements of the power
    carrier are encoded base-|A_s|, so coordinates are digit extractions."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    if k == 1:
        return f
    a = f.domain
    b = power_carrier(a, k)
    decl = f.decl
    in_sizes = a.word_sizes(decl.word)
    out_size = a.size(decl.sort)
    outputs = []
    for args in enumerate_tuples(b, decl.word):
        cols = [decode_tuple(v, c, k) for v, c in zip(args, in_sizes)]
        outputs.append(
            encode_tuple([f.apply([col[l] for col in cols]) for l in range(k)], out_size)
        )
    return OperationTable(b, decl, tuple(outputs))


class MinorTermVar(NamedTuple):
    sort: int
    occurrence: int  # 1-based: which occurrence of this sort in u to read


class MinorTerm(NamedTuple):
    """A formal minor f(x^{s_1}_{j_1}, ..., x^{s_n}_{j_n}); argument i reads
    the j_i-th occurrence of sort s_i in the arity word."""

    vars: tuple[MinorTermVar, ...]

    def feasible(self, u: Word) -> bool:
        need: dict[int, int] = {}
        for v in self.vars:
            need[v.sort] = max(need.get(v.sort, 0), v.occurrence)
        for s, j in need.items():
            if sum(1 for t in u if t == s) < j:
                return False
        return True

    def positions(self, u: Word) -> tuple[int, ...]:
        pos = []
        for v in self.vars:
            seen = 0
            for idx, t in enumerate(u):
                if t == v.sort:
                    seen += 1
                    if seen == v.occurrence:
                        pos.append(idx)
                        break
            else:
                raise ValueError(
                    f"arity word has fewer than {v.occurrence} occurrences of sort {v.sort}"
                )
        return tuple(pos)


def minor_term_eval(f: OperationTable, term: MinorTerm, u: Word) -> OperationTable:
    """Instantiate the term at arity word u (error when infeasible)."""
    w = f.decl.word
    if len(term.vars) != len(w):
        raise ValueError("one variable per argument of f required")
    for i, v in enumerate(term.vars):
        if v.sort != w[i]:
            raise ValueError(f"variable {i} has sort {v.sort}, argument expects {w[i]}")
        if v.occurrence < 1:
            raise ValueError("occurrence indices are 1-based")
    u = check_word(f.domain, u)
    if not term.feasible(u):
        raise ValueError("arity word is infeasible for this term")
    return minor(f, MinorSpec(u, term.positions(u)))


@dataclass(frozen=True)
class MinionHom:
    """A declaration-preserving map commuting with all minors within the bound."""

    source: OperationSet
    target: OperationSet
    mapping: tuple[tuple[OperationTable, OperationTable], ...]

    def as_dict(self) -> dict[OperationTable, OperationTable]:
        return dict(self.mapping)


def verify_minion_hom(hom: MinionHom, surjective: bool = False) -> bool:
    m1, m2 = hom.source, hom.target
    lam = hom.as_dict()
    if set(lam) != set(m1.ops):
        return False
    bound = m1.arity_bound
    num_sorts = m1.domain.num_sorts
    for f, g in lam.items():
        if g not in m2.ops or f.decl != g.decl:
            return False
        for spec in minor_specs(f.decl.word, num_sorts, bound):
            if lam[minor(f, spec)] != minor(g, spec):
                return False
    if surjective and set(lam.values()) != set(m2.ops):
        return False
    return True


def find_minion_hom(
    m1: OperationSet, m2: OperationSet, surjective: bool = False
) -> Optional[MinionHom]:
    """Backtracking search for a minion homomorphism M1 -> M2 (surjective if
    asked).  Both sets must be minor-closed within a shared arity bound;
    carriers may differ but the sort list must be shared."""
    if m1.domain.sorts != m2.domain.sorts:
        raise ValueError("homomorphism requires a shared sort list")
    if m1.arity_bound != m2.arity_bound:
        raise ValueError("bounds must agree")
    if not is_minor_closed(m1):
        raise ValueError("source set not minor-closed within the bound")
    if not is_minor_closed(m2):
        raise ValueError("target set not minor-closed within the bound")
    bound = m1.arity_bound
    num_sorts = m1.domain.num_sorts
    ops1 = m1.sorted_ops()
    by_decl2: dict[Declaration, list[OperationTable]] = {}
    for g in m2.sorted_ops():
        by_decl2.setdefault(g.decl, []).append(g)
    for f in ops1:
        if f.decl not in by_decl2:
            return None

    minor_cache: dict[tuple[OperationTable, MinorSpec], OperationTable] = {}

    def cached_minor(f: OperationTable, spec: MinorSpec) -> OperationTable:
        key = (f, spec)
        g = minor_cache.get(key)
        if g is None:
            g = minor_cache[key] = minor(f, spec)
        return g

    assignment: dict[OperationTable, OperationTable] = {}

    def propagate(f: OperationTable, g: OperationTable, trail: list) -> bool:
        stack = [(f, g)]
        while stack:
            f, g = stack.pop()
            bound_g = assignment.get(f)
            if bound_g is not None:
                if bound_g != g:
                    return False
                continue
            if f.decl != g.decl or g not in m2.ops:
                return False
            assignment[f] = g
            trail.append(f)
            for spec in minor_specs(f.decl.word, num_sorts, bound):
                stack.append((cached_minor(f, spec), cached_minor(g, spec)))
        return True

    target_all = set(m2.ops)

    def dfs(i: int) -> bool:
        while i < len(ops1) and ops1[i] in assignment:
            i += 1
        if i == len(ops1):
            return not surjective or set(assignment.values()) == target_all
        f = ops1[i]
        for g in by_decl2[f.decl]:
            trail: list[OperationTable] = []
            if propagate(f, g, trail) and dfs(i + 1):
                return True
            for x in trail:
                del assignment[x]
        return False

    if not dfs(0):
        return None
    hom = MinionHom(m1, m2, tuple(sorted(assignment.items(), key=lambda t: operation_key(t[0]))))
    if not verify_minion_hom(hom, surjective):
        raise AssertionError("homomorphism failed re-verification")
    return hom
