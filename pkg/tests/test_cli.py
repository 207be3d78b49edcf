from __future__ import annotations

import json

import pytest

from helpers import AND, BOOL, EQ, IDENT, LE, NOT, op_set, two_sorted
from minionlab.cli import main
from minionlab.instances import (
    InstanceDocument,
    dump_document,
    instance_document,
    load_document,
    reflection_document,
)
from minionlab.model import identity_reflection, power_carrier
from minionlab.ops import all_minors, mcf
from minionlab.relpairs import minv
from minionlab.reflift import lift_pair


def write_instance(tmp_path, name, domain, ops=None, pairs=None):
    doc = InstanceDocument(domain, ops or {}, pairs or {})
    path = tmp_path / name
    path.write_text(dump_document(instance_document(doc)), encoding="utf-8")
    return str(path)


@pytest.fixture
def bool_file(tmp_path):
    return write_instance(tmp_path, "bool.json", BOOL,
                          {"and": AND, "ident": IDENT, "not": NOT},
                          {"eq": EQ, "le": LE})


@pytest.fixture
def identity_refl_file(tmp_path):
    doc = {"schema": "minionlab/1",
           "reflection": reflection_document(identity_reflection(BOOL))}
    path = tmp_path / "refl.json"
    path.write_text(dump_document(doc), encoding="utf-8")
    return str(path)


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_validate_text(bool_file, capsys):
    rc, out, _ = run(capsys, ["validate", bool_file])
    assert rc == 0
    assert "ok: 1 sorts, 3 operations, 2 relation pairs" in out


def test_validate_structured_round_trip(bool_file, capsys):
    rc, out, _ = run(capsys, ["validate", bool_file, "--output", "structured"])
    assert rc == 0
    doc = load_document(json.loads(out))
    assert doc.relation_pairs == {"eq": EQ, "le": LE}


def test_validate_missing_file(capsys):
    rc, _, err = run(capsys, ["validate", "/nonexistent.json"])
    assert rc == 2
    assert err.startswith("error:")


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_minors_structured(bool_file, capsys):
    rc, out, _ = run(capsys, ["minors", bool_file, "--op", "and",
                              "--output", "structured"])
    assert rc == 0
    emitted = load_document(json.loads(out))
    assert frozenset(emitted.operations.values()) == all_minors(AND, 2).ops


def test_mcf_structured(bool_file, capsys):
    rc, out, _ = run(capsys, ["mcf", bool_file, "--ops", "and",
                              "--output", "structured"])
    assert rc == 0
    emitted = load_document(json.loads(out))
    assert frozenset(emitted.operations.values()) == mcf([AND], BOOL, 2).ops


def test_mpol_counts_monotone_ops(bool_file, capsys):
    rc, out, _ = run(capsys, ["mpol", bool_file, "--pairs", "le"])
    assert rc == 0
    assert out.splitlines()[0] == "11 operations"


def test_minv_structured(bool_file, capsys):
    rc, out, _ = run(capsys, ["minv", bool_file, "--ops", "not",
                              "--output", "structured"])
    assert rc == 0
    emitted = json.loads(out)
    expect = minv(op_set([NOT]), 2).pairs
    assert len(emitted["relation_pairs"]) == len(expect)


def test_minv_over_budget(bool_file, capsys):
    rc, _, err = run(capsys, ["minv", bool_file, "--arity-bound", "4"])
    assert rc == 2
    assert "error:" in err and "minv_member" in err


def test_mcr_member(bool_file, capsys):
    rc, out, _ = run(capsys, ["mcr-member", bool_file, "--pair", "le",
                              "--generators", "le"])
    assert rc == 0
    assert out.startswith("member: True")
    rc, out, _ = run(capsys, ["mcr-member", bool_file, "--pair", "le",
                              "--generators", "eq"])
    assert rc == 1
    assert out.startswith("member: False")


def test_preserves(bool_file, capsys):
    rc, out, _ = run(capsys, ["preserves", bool_file, "--op", "and", "--pair", "le"])
    assert rc == 0 and "preserves: True" in out
    rc, out, _ = run(capsys, ["preserves", bool_file, "--op", "not", "--pair", "le"])
    assert rc == 1 and "preserves: False" in out


def test_unknown_name_is_usage_error(bool_file, capsys):
    rc, _, err = run(capsys, ["preserves", bool_file, "--op", "zzz", "--pair", "le"])
    assert rc == 2
    assert "operations.zzz" in err


def test_reflect_op_identity(bool_file, identity_refl_file, capsys):
    rc, out, _ = run(capsys, ["reflect-op", bool_file, "--op", "and",
                              "--target", bool_file,
                              "--reflection", identity_refl_file,
                              "--output", "structured"])
    assert rc == 0
    emitted = load_document(json.loads(out))
    assert list(emitted.operations.values()) == [AND]


def test_reflect_and_coreflect_pair_identity(bool_file, identity_refl_file, capsys):
    for cmd in ("reflect-pair", "coreflect-pair"):
        rc, out, _ = run(capsys, [cmd, bool_file, "--pair", "le",
                                  "--target", bool_file,
                                  "--reflection", identity_refl_file,
                                  "--output", "structured"])
        assert rc == 0
        emitted = load_document(json.loads(out))
        assert list(emitted.relation_pairs.values()) == [LE]


def test_lift_and_flatten_round_trip(bool_file, tmp_path, capsys):
    rc, out, _ = run(capsys, ["lift", bool_file, "--pair", "le", "--k", "2",
                              "--output", "structured"])
    assert rc == 0
    emitted = load_document(json.loads(out))
    lifted = list(emitted.relation_pairs.values())[0]
    assert lifted == lift_pair(LE, 2)

    power_file = write_instance(tmp_path, "sq.json", power_carrier(BOOL, 2),
                                pairs={"p": lifted})
    rc, out, _ = run(capsys, ["flatten", bool_file, "--pair", "p", "--k", "2",
                              "--power-file", power_file,
                              "--output", "structured"])
    assert rc == 0
    emitted = load_document(json.loads(out))
    assert list(emitted.relation_pairs.values()) == [LE]


def test_lift_indivisible_arity(bool_file, capsys):
    rc, _, err = run(capsys, ["lift", bool_file, "--pair", "le", "--k", "3"])
    assert rc == 2
    assert "not divisible" in err


def test_flatten_carrier_mismatch(bool_file, capsys):
    rc, _, err = run(capsys, ["flatten", bool_file, "--pair", "le", "--k", "2",
                              "--power-file", bool_file])
    assert rc == 2
    assert "power" in err


def test_check_extension(bool_file, capsys):
    rc, out, _ = run(capsys, ["check-extension", bool_file, "--qa", "le", "--qb", "le"])
    assert rc == 0
    assert "extension: positive" in out
    rc, out, _ = run(capsys, ["check-extension", bool_file, "--qa", "eq", "--qb", "le"])
    assert rc == 1
    assert "extension: negative-within-bounds" in out
    assert "failed inclusion" in out


def test_mc_construct_identical_instance(bool_file, capsys):
    rc, out, _ = run(capsys, ["mc-construct", bool_file, "--qa", "le", "--qb", "le",
                              "--output", "structured"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["status"] == "positive"
    assert doc["witness"]["k"] == 1
    assert doc["timing"] is None


def test_check_reflection_no_reflections(tmp_path, capsys):
    a_file = write_instance(tmp_path, "a.json", two_sorted(("0", "1"), ()))
    b_file = write_instance(tmp_path, "b.json", two_sorted(("0", "1"), ("0",)))
    rc, out, _ = run(capsys, ["check-reflection", a_file, "--target", b_file])
    assert rc == 2
    assert "no-reflections-exist" in out


def test_check_rp_bound_exhausted(bool_file, capsys):
    rc, out, _ = run(capsys, ["check-rp", bool_file, "--qa", "le", "--qb", "le",
                              "--reflection-budget", "1"])
    assert rc == 3
    assert "bound-exhausted" in out


def test_check_power_k1(bool_file, capsys):
    rc, out, _ = run(capsys, ["check-power", bool_file, "--k", "1",
                              "--target", bool_file, "--qa", "le", "--qb", "le"])
    assert rc == 0
    assert "power: positive" in out


def test_check_power_negative(tmp_path, capsys):
    from helpers import bool_pair

    keep0 = bool_pair(1, [(0,)], [(0,)])
    source_file = write_instance(tmp_path, "src.json", BOOL, pairs={"keep0": keep0})
    power_file = write_instance(tmp_path, "sq.json", power_carrier(BOOL, 2))
    rc, out, _ = run(capsys, ["check-power", source_file, "--k", "2",
                              "--target", power_file, "--qa", "keep0",
                              "--arity-bound", "1"])
    assert rc == 1
    assert "power: negative-within-bounds" in out


def test_verify_witness_round_trip(bool_file, tmp_path, capsys):
    rc, out, _ = run(capsys, ["mc-construct", bool_file, "--qa", "le", "--qb", "le",
                              "--output", "structured"])
    assert rc == 0
    report_file = tmp_path / "report.json"
    report_file.write_text(out, encoding="utf-8")
    rc, out, _ = run(capsys, ["verify-witness", bool_file,
                              "--report", str(report_file),
                              "--qa", "le", "--qb", "le"])
    assert rc == 0
    assert "verified: True" in out


def test_verify_witness_rejects_upgraded_kind(bool_file, tmp_path, capsys):
    rc, out, _ = run(capsys, ["mc-construct", bool_file, "--qa", "le", "--qb", "le",
                              "--output", "structured"])
    doc = json.loads(out)
    doc["kind"] = "reflection"
    report_file = tmp_path / "tampered.json"
    report_file.write_text(dump_document(doc), encoding="utf-8")
    rc, out, _ = run(capsys, ["verify-witness", bool_file,
                              "--report", str(report_file),
                              "--qa", "le", "--qb", "le"])
    assert rc == 1
    assert "verified: False" in out


def test_verify_witness_needs_positive_report(bool_file, tmp_path, capsys):
    rc, out, _ = run(capsys, ["check-extension", bool_file, "--qa", "eq", "--qb", "le",
                              "--output", "structured"])
    assert rc == 1
    report_file = tmp_path / "neg.json"
    report_file.write_text(out, encoding="utf-8")
    rc, _, err = run(capsys, ["verify-witness", bool_file,
                              "--report", str(report_file),
                              "--qa", "eq", "--qb", "le"])
    assert rc == 2
    assert "nothing to verify" in err


def test_structured_output_is_deterministic(bool_file, capsys):
    outs = []
    for _ in range(2):
        rc, out, _ = run(capsys, ["mc-construct", bool_file, "--qa", "le",
                                  "--qb", "le", "--output", "structured"])
        assert rc == 0
        outs.append(out)
    assert outs[0] == outs[1]
    for _ in range(2):
        rc, out, _ = run(capsys, ["mpol", bool_file, "--pairs", "le",
                                  "--output", "structured", "--seed", "7"])
        assert rc == 0
        outs.append(out)
    assert outs[2] == outs[3]
