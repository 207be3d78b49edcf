"""Bounded decision procedures for constructibility between relation-pair sets.

Each check truncates its existential quantifiers (power exponent, number of
reflections tried) by explicit bounds and says so in the verdict: a refutation
is "within bounds" unless it is structural (no reflections exist at all), and
a search cut short by the reflection budget is reported as exhaustion, not
refutation.

A candidate reflection is judged on operation sets, not on iterated relational
closures: writing M1 and M2 for the bounded polymorphism sets of Q_A and Q_B,
a reflection is accepted when the reflected powers of M1 land inside M2 and,
where the check demands it, also cover M2.  Membership in a bounded
polymorphism set is characterized exactly by preservation of every generator,
so these image tests decide the two closure inclusions at the bounded arities
with no truncation error, whereas a relational closure computed below the same
arity bound can under-derive members and flip a verdict.  Positive witnesses
are re-verified from their serialized data before being returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .model import (
    OperationTable,
    ReflectionMap,
    SortedSet,
    power_carrier,
    reflection_exists,
)
from .ops import MinionHom, OperationSet, direct_power, find_minion_hom, reflect_op
from .relpairs import RelationPair, RelPairSet, mpol, preserves
from .reflift import flatten_pair

POSITIVE = "positive"
NEGATIVE = "negative-within-bounds"
NO_REFLECTIONS = "no-reflections-exist"
BOUND_EXHAUSTED = "bound-exhausted"


@dataclass(frozen=True)
class CheckBounds:
    arity_bound: int = 2
    k_max: int = 2
    reflection_budget: int = 1 << 16

    def __post_init__(self):
        if min(self.arity_bound, self.k_max, self.reflection_budget) < 1:
            raise ValueError("all bounds must be >= 1")


@dataclass(frozen=True)
class Witness:
    """Outcome of one check: the found (k, reflection) data on success, the
    first failed inclusion on refutation."""

    kind: str
    status: str
    k: Optional[int] = None
    refl: Optional[ReflectionMap] = None
    failed_inclusion: Optional[RelationPair] = None
    hom: Optional[MinionHom] = None

    @property
    def positive(self) -> bool:
        return self.status == POSITIVE


def enumerate_reflections(a: SortedSet, b: SortedSet) -> Iterator[ReflectionMap]:
    """All reflections of a into b, h varying outermost, then h', each
    lexicographic by sort and then by value."""
    if not reflection_exists(a, b):
        return
    hs = []
    hps = []
    for s in range(b.num_sorts):
        if b.size(s) == 0:
            hs.append((None,))
            hps.append((None,))
        else:
            hs.append(tuple(itertools.product(range(a.size(s)), repeat=b.size(s))))
            hps.append(tuple(itertools.product(range(b.size(s)), repeat=a.size(s))))
    for h in itertools.product(*hs):
        for hp in itertools.product(*hps):
            yield ReflectionMap(a, b, h, hp)


# --------------------------------------------------------------- slice tests


@lru_cache(maxsize=4096)
def _slice(q: RelPairSet, bound: int) -> tuple[OperationTable, ...]:
    """The bounded polymorphism set of q, in canonical order."""
    return tuple(mpol(q, bound).sorted_ops())


@lru_cache(maxsize=1 << 18)
def _reflected_power(f: OperationTable, k: int, refl: ReflectionMap) -> Optional[OperationTable]:
    try:
        return reflect_op(direct_power(f, k), refl)
    except ValueError:
        return None


@lru_cache(maxsize=1 << 15)
def _image(m1: tuple[OperationTable, ...], k: int,
           refl: ReflectionMap) -> Optional[frozenset[OperationTable]]:
    """Reflected k-th powers of the operations in m1; None when some
    declaration has no counterpart on the target carrier."""
    out = []
    for f in m1:
        g = _reflected_power(f, k, refl)
        if g is None:
            return None
        out.append(g)
    return frozenset(out)


# ------------------------------------------------------------------ checks


def check_extension(q_a: RelPairSet, q_b: RelPairSet, bounds: CheckBounds) -> Witness:
    """Is every generator of Q_B preserved by every bounded polymorphism of
    Q_A (same carrier)?"""
    if q_a.domain != q_b.domain:
        raise ValueError("extension is defined for one shared carrier")
    m1 = _slice(q_a, bounds.arity_bound)
    for q in q_b.sorted_pairs():
        if not all(preserves(f, q) for f in m1):
            return Witness("extension", NEGATIVE, failed_inclusion=q)
    w = Witness("extension", POSITIVE)
    assert verify_witness(q_a, q_b, w, bounds)
    return w


def _search_reflections(kind: str, q_a: RelPairSet, q_b: RelPairSet,
                        bounds: CheckBounds, k_range, want_onto: bool) -> Witness:
    a, b = q_a.domain, q_b.domain
    if not reflection_exists(a, b):
        return Witness(kind, NO_REFLECTIONS)
    m1 = _slice(q_a, bounds.arity_bound)
    m2 = frozenset(_slice(q_b, bounds.arity_bound))
    exhausted = False
    for k in k_range:
        ak = power_carrier(a, k)
        tried = 0
        for refl in enumerate_reflections(ak, b):
            if tried >= bounds.reflection_budget:
                exhausted = True
                break
            tried += 1
            img = _image(m1, k, refl)
            if img is None or not img <= m2:
                continue
            if want_onto and not m2 <= img:
                continue
            w = Witness(kind, POSITIVE, k=k, refl=refl)
            assert verify_witness(q_a, q_b, w, bounds)
            return w
    return Witness(kind, BOUND_EXHAUSTED if exhausted else NEGATIVE)


def check_reflection(q_a: RelPairSet, q_b: RelPairSet, bounds: CheckBounds) -> Witness:
    """Some reflection of A into B maps the bounded polymorphisms of Q_A
    exactly onto those of Q_B."""
    return _search_reflections("reflection", q_a, q_b, bounds, (1,), True)


def check_er(q_a: RelPairSet, q_b: RelPairSet, bounds: CheckBounds) -> Witness:
    """Some reflection of A into B maps the bounded polymorphisms of Q_A
    into those of Q_B."""
    return _search_reflections("er", q_a, q_b, bounds, (1,), False)


def check_rp_fin(q_a: RelPairSet, q_b: RelPairSet, bounds: CheckBounds) -> Witness:
    """Some k <= k_max and reflection of A^k into B map the powered bounded
    polymorphisms of Q_A exactly onto those of Q_B."""
    return _search_reflections("rp", q_a, q_b, bounds, range(1, bounds.k_max + 1), True)


def mc_constructs(q_a: RelPairSet, q_b: RelPairSet, bounds: CheckBounds) -> Witness:
    """Some k <= k_max and reflection of A^k into B map the powered bounded
    polymorphisms of Q_A into those of Q_B."""
    return _search_reflections("erp", q_a, q_b, bounds, range(1, bounds.k_max + 1), False)


def _power_offender(q_a: RelPairSet, q_b: RelPairSet, k: int,
                    bounds: CheckBounds) -> tuple[bool, Optional[RelationPair]]:
    """(mismatch found, offending generator of Q_B when one exists).

    Forward direction: a power of an operation preserves a pair exactly when
    the operation preserves its flattening, so the powered polymorphisms of
    Q_A land inside those of Q_B iff every polymorphism of Q_A preserves
    every flattened generator of Q_B.  Backward direction: every bounded
    polymorphism of Q_B must itself be such a power.
    """
    a = q_a.domain
    m1 = _slice(q_a, bounds.arity_bound)
    for q in q_b.sorted_pairs():
        flat = flatten_pair(q, k, a)
        for f in m1:
            if not preserves(f, flat):
                return True, q
    powered = frozenset(direct_power(f, k) for f in m1)
    for g in _slice(q_b, bounds.arity_bound):
        if g not in powered:
            return True, None
    return False, None


def check_power(q_a: RelPairSet, q_b: RelPairSet, k: int, bounds: CheckBounds) -> Witness:
    """Do the k-th powers of the bounded polymorphisms of Q_A give exactly
    the bounded polymorphisms of Q_B?  B must be the k-th power carrier
    of A."""
    if q_b.domain != power_carrier(q_a.domain, k):
        raise ValueError("the target carrier is not the requested power of the source")
    mismatch, offender = _power_offender(q_a, q_b, k, bounds)
    if mismatch:
        return Witness("power", NEGATIVE, k=k, failed_inclusion=offender)
    w = Witness("power", POSITIVE, k=k)
    assert verify_witness(q_a, q_b, w, bounds)
    return w


def check_rp_via_hom(m1: OperationSet, m2: OperationSet, bounds: CheckBounds) -> Witness:
    """Homomorphism route: a surjective declaration-preserving map between
    the bounded operation sets."""
    hom = find_minion_hom(m1, m2, surjective=True)
    if hom is None:
        return Witness("rp", NEGATIVE)
    return Witness("rp", POSITIVE, hom=hom)


def check_erp_via_hom(m1: OperationSet, m2: OperationSet, bounds: CheckBounds) -> Witness:
    hom = find_minion_hom(m1, m2, surjective=False)
    if hom is None:
        return Witness("erp", NEGATIVE)
    return Witness("erp", POSITIVE, hom=hom)


def verify_witness(q_a: RelPairSet, q_b: RelPairSet, w: Witness, bounds: CheckBounds) -> bool:
    """Recheck a positive witness from its data alone."""
    if not w.positive:
        raise ValueError("only positive witnesses carry checkable data")
    if w.kind == "extension":
        m1 = _slice(q_a, bounds.arity_bound)
        return all(preserves(f, q) for q in q_b.pairs for f in m1)
    if w.kind == "power":
        if w.k is None or q_b.domain != power_carrier(q_a.domain, w.k):
            return False
        return not _power_offender(q_a, q_b, w.k, bounds)[0]
    if w.kind in ("reflection", "er", "rp", "erp"):
        k = w.k if w.k is not None else 1
        if w.refl is None or w.refl.a != power_carrier(q_a.domain, k) or w.refl.b != q_b.domain:
            return False
        img = _image(_slice(q_a, bounds.arity_bound), k, w.refl)
        if img is None or not img <= frozenset(_slice(q_b, bounds.arity_bound)):
            return False
        if w.kind in ("reflection", "rp"):
            if not frozenset(_slice(q_b, bounds.arity_bound)) <= img:
                return False
        return True
    raise ValueError(f"unknown witness kind {w.kind!r}")
