import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bit_witness import BUILTINS, builtin
from bundled_models import trivial_model
from errors import Budget, BudgetExceeded, EmptySubset, NotAnIdeal, OracleInconsistency, SignatureError
from finite_algebra import Partition, eval_term, load_algebra
from ideal_engine import (
    CONDITIONS, METHODS, build_ideal_report, check_condition, classes_are_images, closed_under,
    closed_under_theta_alpha_zero, derived_ops, eq_class, expand_methods, extended_termset, extension_ideal_check,
    ideal_closure, is_congruence, is_ideal_oracle, kernel_relation_check, list_ideals, related_alphas_inside,
    right_cancellable, sim_relation, subset_sweep, theta_alpha_inclusion, theta_image, theta_images,
)
from term_core import parse_term
from termset_gen import ExtensionMode, Variant, gen_termset

GROUP = builtin("group")
W = GROUP.witness
S3 = GROUP.model("S3")
A3 = frozenset({0, 1, 2})
REFLECTION = frozenset({0, 3})


def test_derived_tables_follow_the_witness():
    d = derived_ops(S3, W)
    assert d.zero == 0
    assert np.array_equal(d.theta, S3.tables["mul"])
    for a in range(6):
        for b in range(6):
            assert d.alphas[0][a, b] == S3.op("mul", a, S3.op("inv", b))


def test_theta_images_are_right_cosets():
    assert theta_image(S3, W, A3, 3) == frozenset({3, 4, 5})
    assert theta_image(S3, W, frozenset({0}), 4) == frozenset({4})
    assert theta_images(S3, W, REFLECTION)[1] == frozenset({1, 4})
    assert theta_image(S3, W, frozenset(), 2) == frozenset()


def test_sim_relation():
    assert sim_relation(S3, W, A3).blocks == ((0, 1, 2), (3, 4, 5))
    assert sim_relation(S3, W, REFLECTION).blocks == ((0, 3), (1, 4), (2, 5))
    assert sim_relation(S3, W, frozenset({0})) == Partition.discrete(6)
    assert eq_class(S3, W, A3, 4) == frozenset({3, 4, 5})
    with pytest.raises(EmptySubset):
        sim_relation(S3, W, frozenset())


def test_is_congruence():
    ok, failure = is_congruence(S3, sim_relation(S3, W, A3))
    assert ok and failure is None
    ok, failure = is_congruence(S3, sim_relation(S3, W, REFLECTION))
    assert not ok and failure.symbol in ("mul", "inv")


@pytest.mark.parametrize("cond", CONDITIONS)
@pytest.mark.parametrize("H, expected", [
    (A3, True),
    (frozenset({0}), True),
    (frozenset(range(6)), True),
    (REFLECTION, False),
    (frozenset({1, 2}), False),
    (frozenset({0, 3, 4}), False),
])
def test_conditions_on_s3(cond, H, expected):
    verdict = check_condition(S3, W, H, cond)
    assert verdict.holds is expected
    assert bool(verdict) is expected
    assert (verdict.failure is None) is expected
    if not expected:
        assert verdict.failure.condition == f"cond-{cond}"


@pytest.mark.parametrize("cond", ["ii", "iii", "iv", "v"])
def test_semiabelian_conditions_agree(cond):
    for H in subset_sweep(S3.size):
        plain = check_condition(S3, W, H, cond).holds
        assert check_condition(S3, W, H, f"cond-{cond}", semiabelian=True).holds is plain


def test_empty_subset_fails_every_condition():
    for cond in CONDITIONS:
        verdict = check_condition(S3, W, [], cond)
        assert not verdict.holds
        assert verdict.failure.clause == "nonempty"


def test_unknown_condition():
    with pytest.raises(ValueError):
        check_condition(S3, W, A3, "viii")


def test_semiabelian_refused_with_extra_constants():
    sig = GROUP.sig.extend([("one", 0)], "pointed")
    tables = {s: S3.tables[s] for s in GROUP.sig.symbols}
    pointed = load_algebra(sig, 6, {**tables, "one": [1]}, "S3p")
    with pytest.raises(SignatureError):
        check_condition(pointed, W, A3, "ii", semiabelian=True)


def test_kernel_condition_names_the_broken_operation():
    verdict = check_condition(S3, W, REFLECTION, "vii")
    assert verdict.failure.clause.startswith("congruence:")


def test_image_inclusion_does_not_make_an_ideal():
    assert theta_alpha_inclusion(S3, W, REFLECTION)
    assert not is_ideal_oracle(S3, 0, REFLECTION)
    assert theta_alpha_inclusion(S3, W, A3)
    assert not theta_alpha_inclusion(S3, W, frozenset({0, 3, 4}))
    assert not theta_alpha_inclusion(S3, W, frozenset())


def test_inclusion_splits_into_two_properties():
    for H in subset_sweep(S3.size):
        both = classes_are_images(S3, W, H) and related_alphas_inside(S3, W, H)
        assert theta_alpha_inclusion(S3, W, H) == both


def test_closed_under_theta_alpha_zero():
    assert closed_under_theta_alpha_zero(S3, W, REFLECTION)
    assert not closed_under_theta_alpha_zero(S3, W, frozenset({3}))
    assert not closed_under_theta_alpha_zero(S3, W, frozenset())
    assert theta_image(S3, W, REFLECTION, 0) == REFLECTION


def test_kernel_relation_descriptions_agree():
    rel = kernel_relation_check(S3, W, A3, 1, 2)
    assert rel.congruent and rel.alphas_inside and rel.a_in_image_of_b and rel.b_in_image_of_a
    assert rel.consistent
    rel = kernel_relation_check(S3, W, A3, 0, 3)
    assert not rel.congruent and rel.consistent
    assert rel.model_dump()["consistent"] is True
    with pytest.raises(NotAnIdeal):
        kernel_relation_check(S3, W, REFLECTION, 0, 3)


@pytest.mark.parametrize("variety", ["group", "ring", "additive_group", "omega_group_demo"])
def test_group_based_witnesses_are_right_cancellable(variety):
    spec = builtin(variety)
    for alg in spec.bundled:
        assert right_cancellable(alg, spec.witness)


def test_right_cancellable_on_a_subset():
    assert right_cancellable(S3, W, restrict_to=A3)
    assert right_cancellable(S3, W, restrict_to=[])


def test_right_cancellable_fails_on_the_nonassociative_loop():
    loop = builtin("loop")
    assert not right_cancellable(loop.model("L5"), loop.witness)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_one_element_algebra(name):
    spec = builtin(name)
    t1 = trivial_model(spec.sig)
    assert right_cancellable(t1, spec.witness)
    assert list_ideals(t1, 0) == [frozenset({0})]
    assert ideal_closure(t1, gen_termset(spec, "iv"), []) == frozenset({0})


def test_closed_under_reports_the_escaping_term():
    verdict = closed_under(S3, gen_termset(GROUP, "iv"), REFLECTION)
    assert not verdict.holds
    f = verdict.failure
    assert f.condition == "termset-iv"
    assert f.clause == "single-slot tau=mul i=1 j=2"
    assert f.term == "mul(mul(x1,mul(y1,x2)),inv(mul(x1,x2)))"
    assert f.value not in REFLECTION
    assert eval_term(S3, parse_term(f.term, GROUP.sig), f.assignment) == f.value
    assert f.assignment["y1"] in REFLECTION


def test_closed_under_accepts_normal_subgroups():
    for variant in Variant:
        assert closed_under(S3, gen_termset(GROUP, variant), A3).holds
    assert not closed_under(S3, gen_termset(GROUP, "iv"), []).holds


def test_ideal_closure():
    ts = gen_termset(GROUP, "iv")
    assert ideal_closure(GROUP.model("Z4"), ts, [2]) == frozenset({0, 2})
    assert ideal_closure(S3, ts, [3]) == frozenset(range(6))
    assert ideal_closure(S3, ts, [1]) == A3
    assert ideal_closure(S3, ts, []) == frozenset({0})
    with pytest.raises(ValueError, match=r"\[-1, 9\] are outside the carrier of S3"):
        ideal_closure(S3, ts, [9, 1, -1])


def test_list_ideals_of_s3():
    assert list_ideals(S3, 0) == [frozenset({0}), A3, frozenset(range(6))]


@pytest.mark.parametrize("variety, model, count", [
    ("group", "S3", 3),
    ("group", "Z4", 3),
    ("group", "V4", 5),
    ("group", "D4", 6),
    ("ring", "Z4", 3),
    ("ring", "Z6", 4),
    ("loop", "L6", 3),
    ("omega_loop_demo", "L6w", 3),
    ("abelian_group", "V4", 5),
])
def test_ideal_census(variety, model, count):
    spec = builtin(variety)
    alg = spec.model(model)
    assert len(list_ideals(alg, derived_ops(alg, spec.witness).zero)) == count


def test_loop_family_models_with_proper_ideals():
    l6 = builtin("loop").model("L6")
    assert list_ideals(l6, 0) == [frozenset({0}), frozenset({0, 1}), frozenset(range(6))]
    semiloops = builtin("semiloop")
    ideals = list_ideals(semiloops.model("SL3xZ2"), 0)
    assert {frozenset({0, 1}), frozenset({0, 2, 4})} <= set(ideals)
    ts = gen_termset(semiloops, "iv")
    assert ideal_closure(semiloops.model("SL3xZ2"), ts, [1]) == frozenset({0, 1})


def test_shared_kernels_are_reported():
    # left projection: every partition is a congruence, so kernels repeat
    proj = load_algebra(GROUP.sig, 3, {"e": [0], "mul": [0, 0, 0, 1, 1, 1, 2, 2, 2], "inv": [0, 1, 2]}, "P3")
    with pytest.raises(OracleInconsistency):
        list_ideals(proj, 0)


def test_oracle_respects_the_budget():
    fresh = load_algebra(GROUP.sig, 4, {s: GROUP.model("V4").tables[s] for s in GROUP.sig.symbols}, "V4copy")
    with pytest.raises(BudgetExceeded):
        is_ideal_oracle(fresh, 0, {0, 1}, Budget(1))


def test_subset_sweep_is_exhaustive_when_small():
    sweep = subset_sweep(3, sample_size=512)
    assert len(sweep) == 7
    assert sweep[:3] == [frozenset({0}), frozenset({1}), frozenset({0, 1})]
    assert len(subset_sweep(9, sample_size=512)) == 511


def test_subset_sweep_samples_when_large():
    first = subset_sweep(10, sample_size=50, seed=7)
    assert first == subset_sweep(10, sample_size=50, seed=7)
    assert len(first) == 50 == len(set(first))
    assert all(first)


def test_expand_methods():
    assert expand_methods(["all"]) == list(METHODS)
    assert expand_methods(["termset-iv", "oracle", "oracle"]) == ["oracle", "termset-iv"]
    with pytest.raises(ValueError):
        expand_methods(["cond-ix"])


def test_report_on_a_normal_subgroup():
    report = build_ideal_report(S3, GROUP, A3)
    assert report.agreement
    assert set(report.verdicts) == set(METHODS)
    assert all(report.verdicts.values())
    assert report.failures == []
    assert report.elapsed_ms is None
    assert build_ideal_report(S3, GROUP, A3, ["oracle"], timing=True).elapsed_ms >= 0


def test_report_on_the_counterexample():
    report = build_ideal_report(S3, GROUP, REFLECTION)
    assert report.agreement
    assert not any(report.verdicts.values())
    assert [f.condition for f in report.failures] == list(report.verdicts)


def test_report_rejects_elements_outside_the_carrier():
    with pytest.raises(ValueError):
        build_ideal_report(S3, GROUP, [0, 6])


MODELS = [("group", "S3"), ("group", "D4"), ("ring", "Z6"), ("loop", "L5"), ("loop", "L6"), ("semiloop", "SL3"),
          ("semiloop", "SL3xZ2"), ("div_inv_groupoid", "DG4"), ("omega_group_demo", "S3w"),
          ("omega_loop_demo", "L6w"), ("abelian_group", "V4")]


@settings(max_examples=40)
@given(st.sampled_from(MODELS), st.data())
def test_every_method_agrees_with_the_oracle(model, data):
    spec = builtin(model[0])
    alg = spec.model(model[1])
    H = data.draw(st.frozensets(st.integers(0, alg.size - 1), min_size=1))
    report = build_ideal_report(alg, spec, H)
    assert report.agreement, report.verdicts


@pytest.mark.parametrize("base, ext", [("additive_group", "ring"), ("group", "omega_group_demo"),
                                       ("loop", "omega_loop_demo")])
@pytest.mark.parametrize("mode", list(ExtensionMode))
def test_extension_checks_agree(base, ext, mode):
    base_spec, ext_spec = builtin(base), builtin(ext)
    for alg in ext_spec.bundled:
        ts = extended_termset(base_spec, ext_spec, Variant.IV, mode)
        for H in subset_sweep(alg.size):
            check = extension_ideal_check(alg, base_spec, ext_spec, H, mode)
            assert check.agree, (alg.name, sorted(H))
            assert closed_under(alg, ts, H).holds == check.direct


def test_extension_must_extend():
    with pytest.raises(SignatureError):
        extension_ideal_check(S3, builtin("ring"), GROUP, A3, "a")
