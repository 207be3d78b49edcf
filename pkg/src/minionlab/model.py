"""Multisorted carriers, words, declarations and finite operation tables.

Elements are handled as dense integer indices into per-sort carriers;
labels only matter at the I/O boundary.  A tuple over a sort of size c is
encoded big-endian as an integer in range(c**m), so regrouping coordinates
never copies data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Sequence

Word = tuple[int, ...]


class Declaration(NamedTuple):
    word: Word
    sort: int


@dataclass(frozen=True)
class SortedSet:
    """A finite family of carriers indexed by a finite ordered sort list."""

    sorts: tuple[str, ...]
    carriers: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.sorts) != len(self.carriers):
            raise ValueError("one carrier per sort required")
        if len(set(self.sorts)) != len(self.sorts):
            raise ValueError("duplicate sort names")
        for name, carrier in zip(self.sorts, self.carriers):
            if len(set(carrier)) != len(carrier):
                raise ValueError(f"duplicate labels in carrier of sort {name!r}")

    @property
    def num_sorts(self) -> int:
        return len(self.sorts)

    def size(self, s: int) -> int:
        return len(self.carriers[s])

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.carriers)

    @cached_property
    def essential(self) -> frozenset[int]:
        """Sorts with a nonempty carrier."""
        return frozenset(s for s in range(self.num_sorts) if self.carriers[s])

    def sort_index(self, name: str) -> int:
        try:
            return self.sorts.index(name)
        except ValueError:
            raise KeyError(f"unknown sort {name!r}") from None

    def element_index(self, s: int, label: str) -> int:
        try:
            return self.carriers[s].index(label)
        except ValueError:
            raise KeyError(f"unknown element {label!r} of sort {self.sorts[s]!r}") from None

    def word_sizes(self, w: Word) -> tuple[int, ...]:
        return tuple(len(self.carriers[s]) for s in w)

    def word_count(self, w: Word) -> int:
        n = 1
        for s in w:
            n *= len(self.carriers[s])
        return n


def check_word(a: SortedSet, w: Sequence[int]) -> Word:
    for s in w:
        if not 0 <= s < a.num_sorts:
            raise ValueError(f"sort index {s} out of range")
    return tuple(w)


def is_reasonable(a: SortedSet, decl: Declaration) -> bool:
    """A declaration (w, s) admits operations on `a` iff an empty output
    carrier forces an empty input product."""
    if a.carriers[decl.sort]:
        return True
    return a.word_count(decl.word) == 0


def all_words(num_sorts: int, max_len: int) -> Iterator[Word]:
    """All words over range(num_sorts) of length <= max_len, shortest first,
    lexicographic within a length."""
    for n in range(max_len + 1):
        yield from itertools.product(range(num_sorts), repeat=n)


def enumerate_tuples(a: SortedSet, w: Word) -> Iterator[tuple[int, ...]]:
    """Index tuples of the product carrier A_w in lexicographic order."""
    yield from itertools.product(*(range(len(a.carriers[s])) for s in w))


def encode_tuple(digits: Sequence[int], base: int) -> int:
    code = 0
    for d in digits:
        code = code * base + d
    return code


def decode_tuple(code: int, base: int, m: int) -> tuple[int, ...]:
    digits = [0] * m
    for j in range(m - 1, -1, -1):
        digits[j] = code % base
        code //= base
    return tuple(digits)


def word_strides(sizes: Sequence[int]) -> tuple[int, ...]:
    strides = [0] * len(sizes)
    acc = 1
    for i in range(len(sizes) - 1, -1, -1):
        strides[i] = acc
        acc *= sizes[i]
    return tuple(strides)


@dataclass(frozen=True)
class OperationTable:
    """A total map A_w -> A_s stored as a dense output vector.

    outputs[i] is the image of the i-th tuple of A_w in lexicographic
    order; the empty product gives a single-entry table, an empty input
    carrier the empty table.  Equality is extensional.
    """

    domain: SortedSet
    decl: Declaration
    outputs: tuple[int, ...]

    def __post_init__(self):
        check_word(self.domain, self.decl.word)
        if not 0 <= self.decl.sort < self.domain.num_sorts:
            raise ValueError(f"sort index {self.decl.sort} out of range")
        if not is_reasonable(self.domain, self.decl):
            raise ValueError("declaration not reasonable in the domain")
        if len(self.outputs) != self.domain.word_count(self.decl.word):
            raise ValueError("table length does not match the input product")
        out_size = self.domain.size(self.decl.sort)
        for v in self.outputs:
            if not 0 <= v < out_size:
                raise ValueError(f"output index {v} outside the output carrier")

    @property
    def arity(self) -> int:
        return len(self.decl.word)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        return word_strides(self.domain.word_sizes(self.decl.word))

    @property
    def is_empty(self) -> bool:
        return not self.outputs

    def apply(self, args: Sequence[int]) -> int:
        idx = 0
        for v, stride in zip(args, self.strides):
            idx += v * stride
        return self.outputs[idx]

    def rows(self) -> Iterator[tuple[tuple[int, ...], int]]:
        for i, args in enumerate(enumerate_tuples(self.domain, self.decl.word)):
            yield args, self.outputs[i]


def operation_key(f: OperationTable):
    return (len(f.decl.word), f.decl.word, f.decl.sort, f.outputs)


def enumerate_declarations(a: SortedSet, arity_bound: int) -> Iterator[Declaration]:
    """All reasonable declarations with |w| <= arity_bound, canonical order."""
    for w in all_words(a.num_sorts, arity_bound):
        for s in range(a.num_sorts):
            decl = Declaration(w, s)
            if is_reasonable(a, decl):
                yield decl


def operation_count(a: SortedSet, arity_bound: int) -> int:
    """Number of operations of arity <= arity_bound over a."""
    total = 0
    for decl in enumerate_declarations(a, arity_bound):
        table_len = a.word_count(decl.word)
        total += a.size(decl.sort) ** table_len if table_len else 1
    return total


def enumerate_operations(a: SortedSet, decl: Declaration) -> Iterator[OperationTable]:
    """All |A_s|**|A_w| operations of one declaration; exactly one (the empty
    map) when A_w is empty."""
    if not is_reasonable(a, decl):
        raise ValueError("declaration not reasonable in the domain")
    table_len = a.word_count(decl.word)
    if table_len == 0:
        yield OperationTable(a, decl, ())
        return
    out_size = a.size(decl.sort)
    for outputs in itertools.product(range(out_size), repeat=table_len):
        yield OperationTable(a, decl, outputs)


@dataclass(frozen=True)
class OperationValidation:
    ok: bool
    issues: tuple[str, ...]
    operation: Optional[OperationTable] = None


def build_operation(
    a: SortedSet,
    decl: Declaration,
    entries: Sequence[tuple[tuple[int, ...], int]],
) -> OperationValidation:
    """Validate raw (input tuple, output) rows against totality, codomain
    membership and reasonableness; diagnostics name the first bad tuple."""
    issues = []
    if not is_reasonable(a, decl):
        issues.append("declaration not reasonable: output carrier empty but input product nonempty")
        return OperationValidation(False, tuple(issues))
    sizes = a.word_sizes(decl.word)
    out_size = a.size(decl.sort)
    table = {}
    for args, value in entries:
        args = tuple(args)
        if len(args) != len(decl.word) or any(
            not 0 <= v < c for v, c in zip(args, sizes)
        ):
            issues.append(f"input tuple {args} does not lie in the input product")
            return OperationValidation(False, tuple(issues))
        if not 0 <= value < out_size:
            issues.append(f"output {value} for input {args} outside the output carrier")
            return OperationValidation(False, tuple(issues))
        if args in table and table[args] != value:
            issues.append(f"conflicting outputs for input {args}")
            return OperationValidation(False, tuple(issues))
        table[args] = value
    outputs = []
    for args in enumerate_tuples(a, decl.word):
        if args not in table:
            issues.append(f"missing input {args}")
            return OperationValidation(False, tuple(issues))
        outputs.append(table[args])
    return OperationValidation(True, (), OperationTable(a, decl, tuple(outputs)))


def validate_operation(f: OperationTable) -> OperationValidation:
    """Re-check a built table; OperationTable construction enforces the same
    invariants, so this reports issues instead of raising."""
    try:
        OperationTable(f.domain, f.decl, f.outputs)
    except ValueError as exc:
        return OperationValidation(False, (str(exc),))
    return OperationValidation(True, (), f)


@dataclass(frozen=True)
class SortedMapping:
    """Per-sort maps source_s -> target_s, defined exactly where `defined`."""

    source: SortedSet
    target: SortedSet
    maps: tuple[Optional[tuple[int, ...]], ...]

    def __post_init__(self):
        if self.source.num_sorts != self.target.num_sorts or len(self.maps) != self.source.num_sorts:
            raise ValueError("sort lists must align")
        for s, m in enumerate(self.maps):
            if m is None:
                continue
            if len(m) != self.source.size(s):
                raise ValueError(f"map at sort {s} must cover the whole source carrier")
            for v in m:
                if not 0 <= v < self.target.size(s):
                    raise ValueError(f"map at sort {s} leaves the target carrier")

    def defined(self, s: int) -> bool:
        return self.maps[s] is not None

    def image(self, s: int, v: int) -> int:
        m = self.maps[s]
        if m is None:
            raise ValueError(f"mapping undefined at sort {s}")
        return m[v]


@dataclass(frozen=True)
class ReflectionMap:
    """A pair of sortwise maps h: B_s -> A_s and h': A_s -> B_s, one each for
    every essential sort of B.  Exists iff every essential sort of B is
    essential in A."""

    a: SortedSet
    b: SortedSet
    h: tuple[Optional[tuple[int, ...]], ...]
    hp: tuple[Optional[tuple[int, ...]], ...]

    def __post_init__(self):
        if self.a.num_sorts != self.b.num_sorts:
            raise ValueError("reflection requires a shared sort list")
        if not reflection_exists(self.a, self.b):
            raise ValueError("no reflections exist: B has an essential sort that is empty in A")
        if len(self.h) != self.b.num_sorts or len(self.hp) != self.b.num_sorts:
            raise ValueError("sort lists must align")
        for s in range(self.b.num_sorts):
            if self.b.size(s) == 0:
                if self.h[s] is not None or self.hp[s] is not None:
                    raise ValueError(f"maps must be undefined at empty sort {s}")
                continue
            hs, hps = self.h[s], self.hp[s]
            if hs is None or hps is None:
                raise ValueError(f"maps required at essential sort {s}")
            if len(hs) != self.b.size(s) or any(not 0 <= v < self.a.size(s) for v in hs):
                raise ValueError(f"h at sort {s} is not a map B_s -> A_s")
            if len(hps) != self.a.size(s) or any(not 0 <= v < self.b.size(s) for v in hps):
                raise ValueError(f"h' at sort {s} is not a map A_s -> B_s")


def reflection_exists(a: SortedSet, b: SortedSet) -> bool:
    return b.essential <= a.essential


def power_carrier(a: SortedSet, k: int) -> SortedSet:
    """The k-th direct power: carriers are k-tuples in lexicographic order,
    labeled '(x,y,...)'.  k = 1 is the identity."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    if k == 1:
        return a
    carriers = []
    for s in range(a.num_sorts):
        labels = []
        for combo in itertools.product(a.carriers[s], repeat=k):
            labels.append("(" + ",".join(str(x) for x in combo) + ")")
        carriers.append(tuple(labels))
    return SortedSet(a.sorts, tuple(carriers))


def identity_reflection(a: SortedSet) -> ReflectionMap:
    ident = tuple(
        tuple(range(a.size(s))) if a.size(s) else None for s in range(a.num_sorts)
    )
    return ReflectionMap(a, a, ident, ident)
