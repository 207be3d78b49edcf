"""JSON documents for instances, reflections, and check reports.

Schema ``minionlab/1``.  An instance document carries a multisorted carrier
plus named operations and relation pairs:

    {"schema": "minionlab/1",
     "sorts": ["v"],
     "carriers": {"v": [0, 1]},
     "operations": {"meet": {"word": ["v", "v"], "sort": "v",
                             "table": [{"args": [0, 0], "out": 0}, ...]}},
     "relation_pairs": {"le": {"arity": 2,
                               "pre": {"v": [[0, 0], [0, 1], [1, 1]]},
                               "post": {"v": [[0, 0], [0, 1], [1, 1]]}}}}

Rows and table entries name carrier elements by their labels.  Reflection
documents give per-sort image lists aligned with the carrier orders, report
documents echo the command, bounds, verdict and witness of one check.
Parsing is strict: unknown keys are rejected, and every diagnostic names the
document path at which it arose.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .checkers import CheckBounds, Witness
from .model import (
    Declaration,
    OperationTable,
    ReflectionMap,
    SortedSet,
    build_operation,
    power_carrier,
)
from .relpairs import RelationPair, RelPairSet, pair_from_rows, pair_key

SCHEMA = "minionlab/1"


class ParseError(ValueError):
    """A validation failure, locating the offending document node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"at {path}: {message}")
        self.path = path


@dataclass(frozen=True)
class InstanceDocument:
    """A parsed instance: one carrier, named operations and relation pairs."""

    domain: SortedSet
    operations: dict[str, OperationTable] = field(default_factory=dict)
    relation_pairs: dict[str, RelationPair] = field(default_factory=dict)

    def pair_set(self, arity_bound: int, names: Optional[list[str]] = None) -> RelPairSet:
        chosen = self.relation_pairs if names is None else {
            name: self.named_pair(name) for name in names
        }
        for name, p in chosen.items():
            if p.arity > arity_bound:
                raise ParseError(f"relation_pairs.{name}",
                                 f"arity {p.arity} exceeds the bound {arity_bound}")
        return RelPairSet(self.domain, frozenset(chosen.values()), arity_bound)

    def named_pair(self, name: str) -> RelationPair:
        if name not in self.relation_pairs:
            raise ParseError(f"relation_pairs.{name}", "no such relation pair")
        return self.relation_pairs[name]

    def named_op(self, name: str) -> OperationTable:
        if name not in self.operations:
            raise ParseError(f"operations.{name}", "no such operation")
        return self.operations[name]


# ------------------------------------------------------------------ parsing


def _expect(data: Any, kind: type, path: str) -> Any:
    if not isinstance(data, kind) or isinstance(data, bool) and kind is not bool:
        raise ParseError(path, f"expected {kind.__name__}, got {type(data).__name__}")
    return data


def _keys(data: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    for key in data:
        if key not in required and key not in optional:
            raise ParseError(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in data:
            raise ParseError(path, f"missing key {key!r}")


def _label_index(a: SortedSet, s: int, label: Any, path: str) -> int:
    try:
        return a.carriers[s].index(label)
    except ValueError:
        raise ParseError(path, f"{label!r} is not an element of sort {a.sorts[s]!r}") from None


def _parse_carrier(data: dict, path: str) -> SortedSet:
    _keys(data, path, ("schema", "sorts", "carriers"), ("operations", "relation_pairs",
                                                        "reflection", "pair"))
    if data.get("schema") != SCHEMA:
        raise ParseError(f"{path}.schema", f"expected {SCHEMA!r}")
    sorts = _expect(data["sorts"], list, f"{path}.sorts")
    if len(set(sorts)) != len(sorts) or not all(isinstance(s, str) for s in sorts):
        raise ParseError(f"{path}.sorts", "sort names must be distinct strings")
    carriers_doc = _expect(data["carriers"], dict, f"{path}.carriers")
    _keys(carriers_doc, f"{path}.carriers", tuple(sorts))
    carriers = []
    for s in sorts:
        elems = _expect(carriers_doc[s], list, f"{path}.carriers.{s}")
        for i, e in enumerate(elems):
            if not isinstance(e, (str, int)) or isinstance(e, bool):
                raise ParseError(f"{path}.carriers.{s}[{i}]",
                                 "elements must be strings or integers")
        if len(set(elems)) != len(elems):
            raise ParseError(f"{path}.carriers.{s}", "elements must be distinct")
        carriers.append(tuple(elems))
    return SortedSet(tuple(sorts), tuple(carriers))


def _parse_word(a: SortedSet, data: Any, path: str) -> tuple[int, ...]:
    word_doc = _expect(data, list, path)
    word = []
    for i, name in enumerate(word_doc):
        if name not in a.sorts:
            raise ParseError(f"{path}[{i}]", f"unknown sort {name!r}")
        word.append(a.sort_index(name))
    return tuple(word)


def _parse_operation(a: SortedSet, data: dict, path: str) -> OperationTable:
    _keys(_expect(data, dict, path), path, ("word", "sort", "table"))
    word = _parse_word(a, data["word"], f"{path}.word")
    if data["sort"] not in a.sorts:
        raise ParseError(f"{path}.sort", f"unknown sort {data['sort']!r}")
    decl = Declaration(word, a.sort_index(data["sort"]))
    entries = []
    table = _expect(data["table"], list, f"{path}.table")
    for i, entry in enumerate(table):
        _keys(_expect(entry, dict, f"{path}.table[{i}]"), f"{path}.table[{i}]",
              ("args", "out"))
        args_doc = _expect(entry["args"], list, f"{path}.table[{i}].args")
        if len(args_doc) != len(word):
            raise ParseError(f"{path}.table[{i}].args",
                             f"expected {len(word)} arguments, got {len(args_doc)}")
        args = tuple(_label_index(a, s, v, f"{path}.table[{i}].args[{j}]")
                     for j, (s, v) in enumerate(zip(word, args_doc)))
        out = _label_index(a, decl.sort, entry["out"], f"{path}.table[{i}].out")
        entries.append((args, out))
    built = build_operation(a, decl, entries)
    if not built.ok:
        raise ParseError(f"{path}.table", "; ".join(built.issues))
    return built.operation


def _parse_rows(a: SortedSet, arity: int, data: dict, path: str) -> list[list[tuple[int, ...]]]:
    _keys(_expect(data, dict, path), path, tuple(a.sorts))
    per_sort = []
    for s, name in enumerate(a.sorts):
        rows_doc = _expect(data[name], list, f"{path}.{name}")
        rows = []
        for i, row in enumerate(rows_doc):
            row_doc = _expect(row, list, f"{path}.{name}[{i}]")
            if len(row_doc) != arity:
                raise ParseError(f"{path}.{name}[{i}]",
                                 f"row length {len(row_doc)} does not match arity {arity}")
            rows.append(tuple(_label_index(a, s, v, f"{path}.{name}[{i}][{j}]")
                              for j, v in enumerate(row_doc)))
        per_sort.append(rows)
    return per_sort


def _parse_pair(a: SortedSet, data: dict, path: str) -> RelationPair:
    _keys(_expect(data, dict, path), path, ("arity", "pre", "post"))
    arity = _expect(data["arity"], int, f"{path}.arity")
    if arity < 0:
        raise ParseError(f"{path}.arity", "arity must be >= 0")
    pre = _parse_rows(a, arity, data["pre"], f"{path}.pre")
    post = _parse_rows(a, arity, data["post"], f"{path}.post")
    return pair_from_rows(a, arity, pre, post)


def load_document(data: Any, path: str = "document") -> InstanceDocument:
    doc = _expect(data, dict, path)
    _keys(doc, path, ("schema", "sorts", "carriers"), ("operations", "relation_pairs"))
    a = _parse_carrier(doc, path)
    operations = {}
    for name, op_doc in sorted(_expect(doc.get("operations", {}), dict,
                                       f"{path}.operations").items()):
        operations[name] = _parse_operation(a, op_doc, f"{path}.operations.{name}")
    relation_pairs = {}
    for name, p_doc in sorted(_expect(doc.get("relation_pairs", {}), dict,
                                      f"{path}.relation_pairs").items()):
        relation_pairs[name] = _parse_pair(a, p_doc, f"{path}.relation_pairs.{name}")
    return InstanceDocument(a, operations, relation_pairs)


def parse_instance(path: str) -> InstanceDocument:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, f"invalid JSON: {exc}") from None
    return load_document(data, path)


def parse_reflection(data: Any, a: SortedSet, b: SortedSet, path: str = "reflection") -> ReflectionMap:
    """Per-sort image lists, aligned with the carrier orders of b (for h)
    and a (for h'); null at empty sorts."""
    doc = _expect(data, dict, path)
    _keys(doc, path, ("h", "hp"))
    maps = {}
    for key, src, dst in (("h", b, a), ("hp", a, b)):
        sub = _expect(doc[key], dict, f"{path}.{key}")
        _keys(sub, f"{path}.{key}", tuple(b.sorts))
        out = []
        for s, name in enumerate(b.sorts):
            images = sub[name]
            if images is None:
                out.append(None)
                continue
            images = _expect(images, list, f"{path}.{key}.{name}")
            if len(images) != src.size(s):
                raise ParseError(f"{path}.{key}.{name}",
                                 f"expected {src.size(s)} images, got {len(images)}")
            out.append(tuple(_label_index(dst, s, v, f"{path}.{key}.{name}[{i}]")
                             for i, v in enumerate(images)))
        maps[key] = tuple(out)
    try:
        return ReflectionMap(a, b, maps["h"], maps["hp"])
    except ValueError as exc:
        raise ParseError(path, str(exc)) from None


def parse_reflection_file(path: str, a: SortedSet, b: SortedSet) -> ReflectionMap:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, f"invalid JSON: {exc}") from None
    doc = _expect(data, dict, path)
    _keys(doc, path, ("schema", "reflection"))
    if doc.get("schema") != SCHEMA:
        raise ParseError(f"{path}.schema", f"expected {SCHEMA!r}")
    return parse_reflection(doc["reflection"], a, b, f"{path}.reflection")


# ------------------------------------------------------------ serialization


def carrier_document(a: SortedSet) -> dict:
    return {
        "schema": SCHEMA,
        "sorts": list(a.sorts),
        "carriers": {name: list(a.carriers[s]) for s, name in enumerate(a.sorts)},
    }


def operation_document(f: OperationTable) -> dict:
    a = f.domain
    return {
        "word": [a.sorts[s] for s in f.decl.word],
        "sort": a.sorts[f.decl.sort],
        "table": [
            {"args": [a.carriers[s][v] for s, v in zip(f.decl.word, args)],
             "out": a.carriers[f.decl.sort][out]}
            for args, out in f.rows()
        ],
    }


def pair_document(p: RelationPair) -> dict:
    a = p.domain
    def rows(which: str) -> dict:
        return {
            name: [[a.carriers[s][v] for v in row] for row in p.rows(s, which)]
            for s, name in enumerate(a.sorts)
        }
    return {"arity": p.arity, "pre": rows("pre"), "post": rows("post")}


def instance_document(doc: InstanceDocument) -> dict:
    out = carrier_document(doc.domain)
    out["operations"] = {name: operation_document(f) for name, f in doc.operations.items()}
    out["relation_pairs"] = {name: pair_document(p) for name, p in doc.relation_pairs.items()}
    return out


def reflection_document(r: ReflectionMap) -> dict:
    def images(maps, dst: SortedSet) -> dict:
        out = {}
        for s, name in enumerate(r.b.sorts):
            m = maps[s]
            out[name] = None if m is None else [dst.carriers[s][v] for v in m]
        return out
    return {"h": images(r.h, r.a), "hp": images(r.hp, r.b)}


def dump_document(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class ClosureReport:
    """One check's outcome: command echo, bounds, verdict, and the witness
    or offending pair."""

    command: str
    kind: str
    bounds: CheckBounds
    status: str
    k: Optional[int] = None
    reflection: Optional[ReflectionMap] = None
    failed_inclusion: Optional[RelationPair] = None
    timing: Optional[float] = None


def report_from_witness(command: str, w: Witness, bounds: CheckBounds,
                        timing: Optional[float] = None) -> ClosureReport:
    return ClosureReport(command, w.kind, bounds, w.status, w.k, w.refl,
                         w.failed_inclusion, timing)


def report_document(report: ClosureReport) -> dict:
    witness = None
    if report.reflection is not None:
        witness = {"k": report.k, "reflection": reflection_document(report.reflection)}
    elif report.k is not None:
        witness = {"k": report.k, "reflection": None}
    offender = None
    if report.failed_inclusion is not None:
        offender = carrier_document(report.failed_inclusion.domain)
        offender["pair"] = pair_document(report.failed_inclusion)
        del offender["schema"]
    return {
        "schema": SCHEMA,
        "command": report.command,
        "kind": report.kind,
        "bounds": {
            "arity_bound": report.bounds.arity_bound,
            "k_max": report.bounds.k_max,
            "reflection_budget": report.bounds.reflection_budget,
        },
        "status": report.status,
        "witness": witness,
        "failed_inclusion": offender,
        "timing": report.timing,
    }


def parse_report(data: Any, a: SortedSet, b: SortedSet, path: str = "report") -> ClosureReport:
    """Reconstruct a report against the instance carriers it talks about;
    a is the source (pre-power) carrier, b the target."""
    doc = _expect(data, dict, path)
    _keys(doc, path, ("schema", "command", "kind", "bounds", "status", "witness",
                      "failed_inclusion", "timing"))
    if doc.get("schema") != SCHEMA:
        raise ParseError(f"{path}.schema", f"expected {SCHEMA!r}")
    bounds_doc = _expect(doc["bounds"], dict, f"{path}.bounds")
    _keys(bounds_doc, f"{path}.bounds", ("arity_bound", "k_max", "reflection_budget"))
    try:
        bounds = CheckBounds(bounds_doc["arity_bound"], bounds_doc["k_max"],
                             bounds_doc["reflection_budget"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}.bounds", str(exc)) from None
    k = None
    refl = None
    witness = doc["witness"]
    if witness is not None:
        _keys(_expect(witness, dict, f"{path}.witness"), f"{path}.witness",
              ("k", "reflection"))
        k = _expect(witness["k"], int, f"{path}.witness.k")
        if k < 1:
            raise ParseError(f"{path}.witness.k", "k must be >= 1")
        if witness["reflection"] is not None:
            refl = parse_reflection(witness["reflection"], power_carrier(a, k), b,
                                    f"{path}.witness.reflection")
    return ClosureReport(str(doc["command"]), str(doc["kind"]), bounds,
                         str(doc["status"]), k, refl, None, doc["timing"])


def sorted_pair_items(pairs: dict[str, RelationPair]) -> list[tuple[str, RelationPair]]:
    return sorted(pairs.items(), key=lambda kv: (pair_key(kv[1]), kv[0]))
