"""Command-line interface.

Every subcommand reads instance documents (see instances), prints either a
human-readable text summary or a deterministic structured JSON document
(--output structured, timing nulled for byte-identical reruns), and exits
with 0 on success or a positive verdict, 1 on a negative verdict, 2 on usage
or validation errors (including "no reflections exist"), and 3 when a search
exhausted its bounds.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Optional

from . import checkers, instances
from .checkers import BOUND_EXHAUSTED, NEGATIVE, NO_REFLECTIONS, POSITIVE, CheckBounds, Witness
from .instances import InstanceDocument, ParseError
from .model import operation_key, power_carrier
from .ops import OperationSet, all_minors, mcf, reflect_op
from .relpairs import mcr_member, minv, mpol, pair_key, preserves, tight_closure
from .reflift import coreflect_pair, flatten_pair, lift_pair, reflect_pair

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3

_STATUS_EXIT = {
    POSITIVE: EXIT_OK,
    NEGATIVE: EXIT_NEGATIVE,
    NO_REFLECTIONS: EXIT_USAGE,
    BOUND_EXHAUSTED: EXIT_EXHAUSTED,
}


def _names(arg: Optional[str]) -> Optional[list[str]]:
    if arg is None:
        return None
    return [n for n in arg.split(",") if n]


def _emit(args, text_lines, document: dict) -> None:
    if args.output == "structured":
        sys.stdout.write(instances.dump_document(document))
    else:
        for line in text_lines:
            print(line)


def _emit_ops(args, doc: InstanceDocument, ops) -> int:
    named = {f"f{i}": f for i, f in enumerate(sorted(ops, key=operation_key))}
    out = instances.carrier_document(doc.domain)
    out["operations"] = {n: instances.operation_document(f) for n, f in named.items()}
    lines = [f"{len(named)} operations"]
    for n, f in named.items():
        word = ",".join(doc.domain.sorts[s] for s in f.decl.word)
        lines.append(f"  {n}: ({word})->{doc.domain.sorts[f.decl.sort]} {list(f.outputs)}")
    _emit(args, lines, out)
    return EXIT_OK


def _emit_pairs(args, domain, pairs) -> int:
    named = {f"p{i}": p for i, p in enumerate(sorted(pairs, key=pair_key))}
    out = instances.carrier_document(domain)
    out["relation_pairs"] = {n: instances.pair_document(p) for n, p in named.items()}
    lines = [f"{len(named)} relation pairs"]
    for n, p in named.items():
        lines.append(f"  {n}: arity {p.arity} pre {p.pre} post {p.post}")
    _emit(args, lines, out)
    return EXIT_OK


def _emit_report(args, command: str, w: Witness, bounds: CheckBounds, started: float) -> int:
    timing = None if args.output == "structured" else time.perf_counter() - started
    report = instances.report_from_witness(command, w, bounds, timing)
    doc = instances.report_document(report)
    lines = [f"{w.kind}: {w.status}"]
    if w.k is not None:
        lines.append(f"  k = {w.k}")
    if w.refl is not None:
        lines.append(f"  reflection = {instances.reflection_document(w.refl)}")
    if w.failed_inclusion is not None:
        lines.append(f"  failed inclusion = {instances.pair_document(w.failed_inclusion)}")
    if timing is not None:
        lines.append(f"  time = {timing:.3f}s")
    _emit(args, lines, doc)
    return _STATUS_EXIT[w.status]


def _bounds(args) -> CheckBounds:
    return CheckBounds(args.arity_bound, args.k_max, args.reflection_budget)


# -------------------------------------------------------------- subcommands


def cmd_validate(args) -> int:
    doc = instances.parse_instance(args.instance)
    lines = [
        f"ok: {len(doc.domain.sorts)} sorts, {len(doc.operations)} operations, "
        f"{len(doc.relation_pairs)} relation pairs"
    ]
    _emit(args, lines, instances.instance_document(doc))
    return EXIT_OK


def cmd_minors(args) -> int:
    doc = instances.parse_instance(args.instance)
    f = doc.named_op(args.op)
    return _emit_ops(args, doc, all_minors(f, args.arity_bound).ops)


def cmd_mcf(args) -> int:
    doc = instances.parse_instance(args.instance)
    names = _names(args.ops)
    ops = doc.operations.values() if names is None else [doc.named_op(n) for n in names]
    return _emit_ops(args, doc, mcf(ops, doc.domain, args.arity_bound).ops)


def cmd_mcr_member(args) -> int:
    doc = instances.parse_instance(args.instance)
    p = doc.named_pair(args.pair)
    q = doc.pair_set(args.arity_bound, _names(args.generators))
    member = mcr_member(p, q)
    closure = tight_closure(q)
    out = {
        "schema": instances.SCHEMA,
        "command": "mcr-member",
        "member": member,
        "pair": instances.pair_document(p),
        "representatives": len(closure.representatives.pairs),
        "truncated": closure.truncated,
    }
    _emit(args, [f"member: {member} ({len(closure.representatives.pairs)} representatives)"], out)
    return EXIT_OK if member else EXIT_NEGATIVE


def cmd_mpol(args) -> int:
    doc = instances.parse_instance(args.instance)
    q = doc.pair_set(args.arity_bound, _names(args.pairs))
    return _emit_ops(args, doc, mpol(q, args.arity_bound).ops)


def cmd_minv(args) -> int:
    doc = instances.parse_instance(args.instance)
    names = _names(args.ops)
    ops = doc.operations.values() if names is None else [doc.named_op(n) for n in names]
    fs = OperationSet(doc.domain, frozenset(ops), args.arity_bound)
    return _emit_pairs(args, doc.domain, minv(fs, args.arity_bound).pairs)


def cmd_preserves(args) -> int:
    doc = instances.parse_instance(args.instance)
    f = doc.named_op(args.op)
    p = doc.named_pair(args.pair)
    ok = preserves(f, p)
    out = {"schema": instances.SCHEMA, "command": "preserves", "preserves": ok}
    _emit(args, [f"preserves: {ok}"], out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _load_reflection(args, a, b):
    return instances.parse_reflection_file(args.reflection, a, b)


def cmd_reflect_op(args) -> int:
    doc = instances.parse_instance(args.instance)
    target = instances.parse_instance(args.target)
    r = _load_reflection(args, doc.domain, target.domain)
    g = reflect_op(doc.named_op(args.op), r)
    return _emit_ops(args, InstanceDocument(target.domain), [g])


def cmd_reflect_pair(args) -> int:
    doc = instances.parse_instance(args.instance)
    target = instances.parse_instance(args.target)
    r = _load_reflection(args, doc.domain, target.domain)
    t = reflect_pair(doc.named_pair(args.pair), r)
    return _emit_pairs(args, target.domain, [t])


def cmd_coreflect_pair(args) -> int:
    doc = instances.parse_instance(args.instance)
    target = instances.parse_instance(args.target)
    r = _load_reflection(args, doc.domain, target.domain)
    p = coreflect_pair(target.named_pair(args.pair), r)
    return _emit_pairs(args, doc.domain, [p])


def cmd_lift(args) -> int:
    doc = instances.parse_instance(args.instance)
    p = doc.named_pair(args.pair)
    lifted = lift_pair(p, args.k)
    return _emit_pairs(args, lifted.domain, [lifted])


def cmd_flatten(args) -> int:
    doc = instances.parse_instance(args.instance)
    power = instances.parse_instance(args.power_file)
    if power.domain != power_carrier(doc.domain, args.k):
        raise ParseError(args.power_file,
                         f"carrier is not the {args.k}-th power of {args.instance}")
    t = power.named_pair(args.pair)
    flat = flatten_pair(t, args.k, doc.domain)
    return _emit_pairs(args, doc.domain, [flat])


def _two_sets(args):
    doc = instances.parse_instance(args.instance)
    target = instances.parse_instance(args.target) if args.target else doc
    q_a = doc.pair_set(args.arity_bound, _names(args.qa))
    q_b = target.pair_set(args.arity_bound, _names(args.qb))
    return q_a, q_b


def cmd_check_extension(args) -> int:
    started = time.perf_counter()
    q_a, q_b = _two_sets(args)
    w = checkers.check_extension(q_a, q_b, _bounds(args))
    return _emit_report(args, "check-extension", w, _bounds(args), started)


def _check_refl(args, command: str, fn) -> int:
    started = time.perf_counter()
    q_a, q_b = _two_sets(args)
    w = fn(q_a, q_b, _bounds(args))
    return _emit_report(args, command, w, _bounds(args), started)


def cmd_check_reflection(args) -> int:
    return _check_refl(args, "check-reflection", checkers.check_reflection)


def cmd_check_er(args) -> int:
    return _check_refl(args, "check-er", checkers.check_er)


def cmd_check_rp(args) -> int:
    return _check_refl(args, "check-rp", checkers.check_rp_fin)


def cmd_mc_construct(args) -> int:
    return _check_refl(args, "mc-construct", checkers.mc_constructs)


def cmd_check_power(args) -> int:
    started = time.perf_counter()
    q_a, q_b = _two_sets(args)
    w = checkers.check_power(q_a, q_b, args.k, _bounds(args))
    return _emit_report(args, "check-power", w, _bounds(args), started)


def cmd_verify_witness(args) -> int:
    doc = instances.parse_instance(args.instance)
    target = instances.parse_instance(args.target) if args.target else doc
    with open(args.report, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(args.report, f"invalid JSON: {exc}") from None
    report = instances.parse_report(data, doc.domain, target.domain, args.report)
    q_a = doc.pair_set(report.bounds.arity_bound, _names(args.qa))
    q_b = target.pair_set(report.bounds.arity_bound, _names(args.qb))
    w = Witness(report.kind, report.status, report.k, report.reflection)
    if not w.positive:
        print(f"report status is {report.status!r}; nothing to verify", file=sys.stderr)
        return EXIT_USAGE
    ok = checkers.verify_witness(q_a, q_b, w, report.bounds)
    out = {"schema": instances.SCHEMA, "command": "verify-witness", "verified": ok}
    _emit(args, [f"verified: {ok}"], out)
    return EXIT_OK if ok else EXIT_NEGATIVE


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--arity-bound", type=int, default=2)
    shared.add_argument("--k-max", type=int, default=2)
    shared.add_argument("--reflection-budget", type=int, default=1 << 16)
    shared.add_argument("--output", choices=("text", "structured"), default="text")
    shared.add_argument("--seed", type=int, default=None,
                        help="seed for randomized property runs")
    parser = argparse.ArgumentParser(
        prog="minionlab",
        description="Bounded closures and constructibility checks for "
                    "multisorted operations and relation pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        s = sub.add_parser(name, parents=[shared], **kwargs)
        s.add_argument("instance", help="instance document (JSON)")
        s.set_defaults(fn=fn)
        return s

    add("validate", cmd_validate, help="parse and validate an instance document")

    s = add("minors", cmd_minors, help="all minors of one operation within the bound")
    s.add_argument("--op", required=True)

    s = add("mcf", cmd_mcf, help="minor closure of the named operations")
    s.add_argument("--ops", help="comma-separated names (default: all)")

    s = add("mcr-member", cmd_mcr_member,
            help="is a pair in the bounded closure of the generators?")
    s.add_argument("--pair", required=True)
    s.add_argument("--generators", help="comma-separated names (default: all)")

    s = add("mpol", cmd_mpol, help="operations preserving the named pairs")
    s.add_argument("--pairs", help="comma-separated names (default: all)")

    s = add("minv", cmd_minv, help="pairs preserved by the named operations")
    s.add_argument("--ops", help="comma-separated names (default: all)")

    s = add("preserves", cmd_preserves, help="does one operation preserve one pair?")
    s.add_argument("--op", required=True)
    s.add_argument("--pair", required=True)

    for name, fn, which in (("reflect-op", cmd_reflect_op, "--op"),
                            ("reflect-pair", cmd_reflect_pair, "--pair"),
                            ("coreflect-pair", cmd_coreflect_pair, "--pair")):
        s = add(name, fn, help=f"transport along a reflection ({name})")
        s.add_argument(which, required=True)
        s.add_argument("--target", required=True, help="target instance document")
        s.add_argument("--reflection", required=True, help="reflection document (JSON)")

    s = add("lift", cmd_lift, help="regroup a km-ary pair as an m-ary pair on the power")
    s.add_argument("--pair", required=True)
    s.add_argument("--k", type=int, required=True)

    s = add("flatten", cmd_flatten, help="regroup an m-ary pair on the power as km-ary")
    s.add_argument("--pair", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--power-file", required=True,
                   help="instance document on the power carrier holding the pair")

    for name, fn in (("check-extension", cmd_check_extension),
                     ("check-reflection", cmd_check_reflection),
                     ("check-er", cmd_check_er),
                     ("check-rp", cmd_check_rp),
                     ("mc-construct", cmd_mc_construct)):
        s = add(name, fn, help=f"constructibility check ({name})")
        s.add_argument("--target", help="target instance document (default: instance)")
        s.add_argument("--qa", help="comma-separated pair names on the source")
        s.add_argument("--qb", help="comma-separated pair names on the target")

    s = add("check-power", cmd_check_power, help="constructibility check (power)")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--target", required=True, help="instance on the k-th power carrier")
    s.add_argument("--qa", help="comma-separated pair names on the source")
    s.add_argument("--qb", help="comma-separated pair names on the target")

    s = add("verify-witness", cmd_verify_witness, help="recheck an emitted positive report")
    s.add_argument("--report", required=True, help="report document (JSON)")
    s.add_argument("--target", help="target instance document (default: instance)")
    s.add_argument("--qa", help="comma-separated pair names on the source")
    s.add_argument("--qb", help="comma-separated pair names on the target")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
