import os

import numpy as np
import pytest

import config
from bit_witness import BUILTINS, builtin, failing_identities, verify_witness
from bundled_models import trivial_model
from errors import AlgebraFormatError, Budget, BudgetExceeded, SignatureError, UnboundVariable
from finite_algebra import (
    Partition, UnionFind, all_congruences, compatibility_failure, dump_algebra, eval_term, holds_identity,
    is_zero_ideal_term, kernel_of, load_algebra, load_algebra_file, parse_algebra, principal_congruence, reduct,
    subset_label, subuniverse,
)
from term_core import parse_term

GROUP = builtin("group")
S3 = GROUP.model("S3")


def _term(text, spec=GROUP):
    return parse_term(text, spec.sig)


def test_load_algebra_rejects_bad_tables():
    sig = GROUP.sig
    good = {"e": [0], "mul": [0, 1, 1, 0], "inv": [0, 1]}
    assert load_algebra(sig, 2, good, "Z2").size == 2
    with pytest.raises(AlgebraFormatError, match="missing"):
        load_algebra(sig, 2, {"e": [0], "mul": [0, 1, 1, 0]})
    with pytest.raises(AlgebraFormatError, match="entries"):
        load_algebra(sig, 2, {**good, "mul": [0, 1, 1]})
    with pytest.raises(AlgebraFormatError, match="out of range"):
        load_algebra(sig, 2, {**good, "inv": [0, 2]})
    with pytest.raises(AlgebraFormatError, match="unknown"):
        load_algebra(sig, 2, {**good, "omega": [0, 0, 0, 0]})
    with pytest.raises(AlgebraFormatError):
        load_algebra(sig, 0, good)


def test_tables_are_read_only():
    with pytest.raises(ValueError):
        S3.tables["mul"][0, 0] = 1


def test_eval_term():
    assert eval_term(S3, _term("mul(x1,x2)"), {"x1": 3, "x2": 1}) == 4
    assert eval_term(S3, _term("inv(e)")) == 0
    with pytest.raises(UnboundVariable):
        eval_term(S3, _term("mul(x1,y1)"), {"x1": 0})


def test_holds_identity_returns_a_real_counterexample():
    assert holds_identity(S3, _term("mul(mul(x1,x2),x3)"), _term("mul(x1,mul(x2,x3))")).holds
    check = holds_identity(S3, _term("mul(x1,x2)"), _term("mul(x2,x1)"))
    assert not check.holds
    a, b = check.counter["x1"], check.counter["x2"]
    assert S3.op("mul", a, b) != S3.op("mul", b, a)


def test_holds_identity_charges_the_budget():
    with pytest.raises(BudgetExceeded) as info:
        holds_identity(S3, _term("mul(mul(x1,x2),x3)"), _term("mul(x1,mul(x2,x3))"), Budget(100))
    assert info.value.limit == 100
    assert info.value.used > 100


def test_zero_ideal_terms():
    assert is_zero_ideal_term(S3, 0, _term("mul(mul(x1,y1),inv(x1))"))
    assert not is_zero_ideal_term(S3, 0, _term("mul(x1,y1)"))


def test_subuniverse():
    assert subuniverse(S3, [1]) == frozenset({0, 1, 2})
    assert subuniverse(S3, [3]) == frozenset({0, 3})
    assert subuniverse(S3, []) == frozenset({0})


def test_partition_normalises_block_order():
    p = Partition(((2, 0), (1,)))
    assert p.blocks == ((0, 2), (1,))
    assert Partition.from_labels([5, 5, 7]).blocks == ((0, 1), (2,))
    assert p.same(0, 2) and not p.same(0, 1)
    assert list(p.labels()) == [0, 1, 0]
    with pytest.raises(ValueError):
        Partition(((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        Partition(((0,), (2,)))


def test_partition_join_and_refinement():
    p = Partition(((0, 1), (2,), (3,)))
    q = Partition(((0,), (1,), (2, 3)))
    j = p.join(q)
    assert j.blocks == ((0, 1), (2, 3))
    assert p.refines(j) and q.refines(j)
    assert not j.refines(p)
    assert Partition.discrete(4).refines(p)
    assert p.refines(Partition.total(4))


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 3)
    assert uf.union(3, 4)
    assert not uf.union(0, 4)
    assert uf.partition().blocks == ((0, 3, 4), (1,), (2,))


def test_principal_congruences_of_s3():
    assert principal_congruence(S3, 0, 1).blocks == ((0, 1, 2), (3, 4, 5))
    assert principal_congruence(S3, 0, 3) == Partition.total(6)


@pytest.mark.parametrize("variety, model, count", [
    ("group", "S3", 3),
    ("group", "Z4", 3),
    ("group", "V4", 5),
    ("group", "D4", 6),
    ("ring", "Z6", 4),
    ("loop", "L5", 2),
    ("semiloop", "SL3", 2),
    ("loop", "L6", 3),
    ("omega_loop_demo", "L6w", 3),
])
def test_congruence_lattice_sizes(variety, model, count):
    alg = builtin(variety).model(model)
    lattice = all_congruences(alg)
    assert len(lattice) == count
    assert lattice[0] == Partition.discrete(alg.size)
    assert lattice[-1] == Partition.total(alg.size)
    assert all(compatibility_failure(alg, p) is None for p in lattice)


def test_cached_lattice_still_charges_the_budget():
    all_congruences(S3)
    budget = Budget()
    all_congruences(S3, budget)
    assert budget.used > 0


def test_compatibility_failure_is_a_real_violation():
    cosets = Partition(((0, 3), (1, 4), (2, 5)))
    bad = compatibility_failure(S3, cosets)
    assert bad is not None
    lab = cosets.labels()
    assert all(lab[l] == lab[r] for l, r in zip(bad.left, bad.right))
    assert lab[S3.op(bad.symbol, *bad.left)] != lab[S3.op(bad.symbol, *bad.right)]


def test_kernel_of():
    p = Partition(((0, 1, 2), (3, 4, 5)))
    assert kernel_of(p, 0) == frozenset({0, 1, 2})
    assert kernel_of(p, 4) == frozenset({3, 4, 5})


def test_data_file_matches_bundled_model():
    loaded = load_algebra_file(os.path.join(config.DATA_DIR, "s3.alg"), GROUP.sig)
    assert loaded.name == "S3"
    for sym in GROUP.sig.symbols:
        assert np.array_equal(loaded.tables[sym], S3.tables[sym])


def test_dumped_algebra_parses_back():
    ring = builtin("ring")
    z6 = ring.model("Z6")
    again = parse_algebra(dump_algebra(z6), ring.sig)
    assert again.name == "Z6"
    assert all(again.flat_table(s) == z6.flat_table(s) for s in ring.sig.symbols)


@pytest.mark.parametrize("text, message", [
    ("algebra A : ring\nsize 2\n", "not 'group'"),
    ("algebra A : group\nsize two\n", "integer"),
    ("algebra A : group\nsize 1\ntable e\n0\ntable e\n0\n", "duplicate"),
    ("algebra A : group\nsize 2\ntable mul\n0 1 1\n", "end of algebra file"),
    ("algebra A : group\nsize 1\ntable omega\n0\n", "unknown symbol"),
    ("algebra A group\nsize 1\n", "expected ':'"),
])
def test_parse_algebra_errors(text, message):
    with pytest.raises(AlgebraFormatError, match=message):
        parse_algebra(text, GROUP.sig)


def test_reduct_forgets_operations():
    z4 = builtin("ring").model("Z4")
    additive = builtin("additive_group").sig
    r = reduct(z4, additive)
    assert r.sig == additive
    assert "mul" not in r.tables
    with pytest.raises(SignatureError):
        reduct(r, builtin("ring").sig)


def test_subset_label():
    assert subset_label({3, 0, 1}) == "0,1,3"
    assert subset_label(()) == ""


def _copy(alg, name):
    return load_algebra(alg.sig, alg.size, {s: alg.tables[s] for s in alg.sig.symbols}, name)


def test_lattice_enumeration_runs_under_the_callers_budget(monkeypatch):
    monkeypatch.setattr(config, "BUDGET", 10)
    d4 = _copy(GROUP.model("D4"), "D4 generous")
    assert len(all_congruences(d4, Budget(10 ** 9))) == 6


def test_exhausted_enumeration_is_not_cached():
    d4 = _copy(GROUP.model("D4"), "D4 tight")
    with pytest.raises(BudgetExceeded) as info:
        all_congruences(d4, Budget(50))
    assert info.value.limit == 50
    assert len(all_congruences(d4, Budget())) == 6


def test_cached_lattice_charges_its_recorded_cost():
    d4 = _copy(GROUP.model("D4"), "D4 twice")
    first, second = Budget(), Budget()
    all_congruences(d4, first)
    all_congruences(d4, second)
    assert second.used == first.used > 0
    with pytest.raises(BudgetExceeded):
        all_congruences(d4, Budget(first.used - 1))


@pytest.mark.parametrize("variety, model", [
    ("group", "D4"),
    ("loop", "L6"),
    ("semiloop", "SL3xZ2"),
])
def test_principal_congruence_is_the_least_identifying_the_pair(variety, model):
    alg = builtin(variety).model(model)
    lattice = all_congruences(alg)
    for a in range(alg.size):
        for b in range(a + 1, alg.size):
            p = principal_congruence(alg, a, b)
            assert p.same(a, b)
            assert p in lattice
            assert all(p.refines(c) for c in lattice if c.same(a, b))


def test_non_simple_loop_family_models():
    l6 = builtin("loop").model("L6")
    assert [p.as_lists() for p in all_congruences(l6)][1] == [[0, 1], [2, 3], [4, 5]]
    # (2*2)*4 = 3 while 2*(2*4) = 2
    assert not holds_identity(l6, _term("mul(mul(x1,x2),x3)", builtin("loop")),
                              _term("mul(x1,mul(x2,x3))", builtin("loop"))).holds
    assert l6.op("mul", l6.op("mul", 2, 2), 4) == 3
    assert l6.op("mul", 2, l6.op("mul", 2, 4)) == 2
    product = builtin("semiloop").model("SL3xZ2")
    kernels = {kernel_of(p, 0) for p in all_congruences(product)}
    assert {frozenset({0, 1}), frozenset({0, 2, 4})} <= kernels


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_one_element_algebra(name):
    spec = builtin(name)
    t1 = trivial_model(spec.sig)
    assert not failing_identities(t1, spec.identities)
    assert verify_witness(t1, spec.witness).ok
    lattice = all_congruences(t1)
    assert lattice == [Partition.discrete(1)] == [Partition.total(1)]
    assert kernel_of(lattice[0], 0) == frozenset({0})
