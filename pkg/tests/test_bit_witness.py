import os

import pytest

import config
from bit_witness import (
    BUILTINS, BitWitness, VarietySpec, builtin, dump_signature, extend_signature, failing_identities,
    load_signature_file, parse_signature, verify_variety, verify_witness, witness_identities, zero_element,
)
from errors import AlgebraFormatError, SignatureError, UnknownVariety
from finite_algebra import holds_identity
from term_core import app, parse_term, x, y

GROUP = builtin("group")


@pytest.mark.parametrize("name", list(BUILTINS))
def test_witness_holds_on_every_bundled_model(name):
    spec = builtin(name)
    assert spec.bundled
    summary = verify_variety(spec)
    assert summary.ok, summary.model_dump()
    assert [r.algebra for r in summary.reports] == [alg.name for alg in spec.bundled]


@pytest.mark.parametrize("name", list(BUILTINS))
def test_bundled_models_satisfy_their_laws(name):
    spec = builtin(name)
    for alg in spec.bundled:
        assert failing_identities(alg, spec.identities) == [], alg.name


def test_a_broken_alpha_is_reported_with_an_assignment():
    broken = BitWitness(GROUP.witness.zero, (parse_term("mul(x1,x2)", GROUP.sig),), GROUP.witness.theta)
    report = verify_witness(GROUP.model("S3"), broken)
    assert not report.ok
    names = [f.identity for f in report.failures]
    assert "alpha1(x,x)=0" in names
    assert all(f.assignment for f in report.failures)


def test_witness_identities_cover_every_alpha():
    assert len(witness_identities(GROUP.witness)) == GROUP.witness.n + 2


def test_witness_shape_is_validated():
    sig = GROUP.sig
    e = app("e")
    theta = parse_term("mul(x1,x2)", sig)
    with pytest.raises(SignatureError, match="ground"):
        BitWitness(x(1), (parse_term("mul(x1,inv(x2))", sig),), theta)
    with pytest.raises(SignatureError, match="alpha1"):
        BitWitness(e, (parse_term("mul(y1,inv(x2))", sig),), theta)
    with pytest.raises(SignatureError, match="theta"):
        BitWitness(e, (parse_term("mul(x1,inv(x2))", sig),), parse_term("mul(x1,x3)", sig))
    with pytest.raises(SignatureError):
        BitWitness(e, (), theta)


def test_witness_must_fit_the_signature():
    w = BitWitness(app("e"), (app("div", x(1), x(2)),), app("mul", x(1), x(2)))
    with pytest.raises(SignatureError, match="div"):
        VarietySpec("broken", GROUP.sig, w)


def test_theta_keeps_the_base_element_last():
    t = GROUP.witness.theta_of([y(1)], x(1))
    assert t == app("mul", y(1), x(1))


def test_builtins_are_cached_and_named():
    assert builtin("group") is builtin("group")
    assert builtin("ring").sig.symbols == ("zero", "add", "neg", "mul")
    with pytest.raises(UnknownVariety):
        builtin("lattice")
    with pytest.raises(UnknownVariety):
        GROUP.model("Q8")


def test_zero_element():
    assert zero_element(GROUP.model("D4"), GROUP.witness) == 0


def test_bundled_loop_is_not_a_group():
    loop = builtin("loop")
    l5 = loop.model("L5")
    check = holds_identity(l5, parse_term("mul(mul(x1,x2),x3)", loop.sig), parse_term("mul(x1,mul(x2,x3))", loop.sig))
    assert not check.holds


def test_extend_signature():
    spec = extend_signature(GROUP, [("omega", 2)], "omega_group")
    assert spec.sig.symbols[-1] == "omega"
    assert spec.witness == GROUP.witness
    with pytest.raises(SignatureError):
        extend_signature(GROUP, [("mul", 2)])


def test_signature_file_matches_builtin():
    spec = load_signature_file(os.path.join(config.DATA_DIR, "group.sig"))
    assert spec.sig == GROUP.sig
    assert spec.witness == GROUP.witness
    assert spec.semiabelian


def test_semiabelian_flag_in_signature_files():
    loop = load_signature_file(os.path.join(config.DATA_DIR, "loop.sig"))
    assert loop.semiabelian
    pointed = parse_signature(
        "signature pointed\nop e 0\nop one 0\nop mul 2\nop inv 1\nwitness n=1\n"
        "zero: e\nalpha1: mul(x1,inv(x2))\ntheta: mul(x1,x2)\n"
    )
    assert not pointed.semiabelian
    forced = parse_signature(dump_signature(pointed) + "semiabelian: yes\n")
    assert forced.semiabelian


def test_dumped_signature_parses_back():
    ring = builtin("ring")
    again = parse_signature(dump_signature(ring))
    assert again.sig == ring.sig
    assert again.witness == ring.witness


@pytest.mark.parametrize("text, message", [
    ("op e 0\nwitness n=1\nzero: e\nalpha1: e\ntheta: e\n", "signature"),
    ("signature s\nop e zero\n", "op"),
    ("signature s\nop e 0\nwitness n=0\n", "witness"),
    ("signature s\nop e 0\nop mul 2\nwitness n=1\nzero: e\ntheta: mul(x1,x2)\n", "alpha1"),
    ("signature s\nop e 0\nwitness n=1\nwhat is this\n", "cannot parse"),
])
def test_signature_file_errors(text, message):
    with pytest.raises(AlgebraFormatError, match=message):
        parse_signature(text)
