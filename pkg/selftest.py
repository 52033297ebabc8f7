# selftest.py
"""Invariant suites run against the bundled models and the files under data/."""
import logging
import os
from functools import lru_cache, reduce
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, computed_field

import config
from bit_witness import (
    BUILTINS, BitWitness, VarietySpec, builtin, failing_identities, verify_witness, zero_element,
)
from bundled_models import trivial_model
from classical_sets import REFERENCE_SETS, reference_sets_for
from errors import BitError, Budget
from finite_algebra import (
    FiniteAlgebra, Partition, all_congruences, compatibility_failure, is_zero_ideal_term, load_algebra_file,
    subset_label,
)
from ideal_engine import (
    build_ideal_report, check_condition, classes_are_images, closed_under, closed_under_theta_alpha_zero,
    congruence_for_kernel, eq_class, extended_termset, extension_ideal_check, ideal_closure,
    is_ideal_oracle, kernel_relation_check, list_ideals, related_alphas_inside, sim_relation, subset_sweep,
    theta_alpha_inclusion, theta_image,
)
from term_core import parse_term, print_term, validate_term
from termset_gen import ExtensionMode, TermSet, Variant, gen_termset

logger = logging.getLogger("bit_selftest")

# expected ideal counts of the bundled models, by (variety, model)
CENSUS = {
    ("group", "S3"): 3,
    ("group", "Z4"): 3,
    ("group", "V4"): 5,
    ("group", "D4"): 6,
    ("ring", "Z4"): 3,
    ("ring", "Z6"): 4,
    ("loop", "L6"): 3,
    ("omega_loop_demo", "L6w"): 3,
}

# models whose only congruences are the trivial ones
SIMPLE_MODELS = (("loop", "L5"), ("semiloop", "SL3"))

# data file, variety, bundled model it must reproduce
FIXTURES = (
    ("s3.alg", "group", "S3"),
    ("z4.alg", "group", "Z4"),
    ("v4.alg", "group", "V4"),
    ("z4_ring.alg", "ring", "Z4"),
)

EXTENSIONS = (("additive_group", "ring"), ("group", "omega_group_demo"), ("loop", "omega_loop_demo"))

# (variety, subvariety over the same operations); sets of the first decide ideals in the second
SAME_SIGNATURE = (("group", "abelian_group"), ("div_inv_groupoid", "semiloop"))


class SuiteResult(BaseModel):
    name: str
    checked: int = 0
    failures: List[str] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.failures


class SelftestReport(BaseModel):
    suites: List[SuiteResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)


class _Run:
    """Collects check outcomes for one suite."""

    def __init__(self, name: str):
        self.result = SuiteResult(name=name)

    def check(self, ok: bool, message: Callable[[], str]) -> bool:
        self.result.checked += 1
        if not ok:
            self.result.failures.append(message())
        return ok


Suite = Callable[[_Run, Budget, str], None]


def _models() -> List[Tuple[VarietySpec, FiniteAlgebra]]:
    return [(builtin(name), alg) for name in BUILTINS for alg in builtin(name).bundled]


@lru_cache(maxsize=None)
def _termset(variety: str, variant: Variant, semiabelian: bool = False) -> TermSet:
    return gen_termset(builtin(variety), variant, semiabelian)


def _where(alg: FiniteAlgebra, H: Iterable[int]) -> str:
    return f"{alg.name} {{{subset_label(H)}}}"


# ---------- suites ----------

def witness_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        report = verify_witness(alg, spec.witness, budget)
        run.check(report.ok, lambda: f"{spec.name}/{alg.name}: {[f.identity for f in report.failures]}")
    for name in BUILTINS:
        spec = builtin(name)
        report = verify_witness(trivial_model(spec.sig), spec.witness, budget)
        run.check(report.ok, lambda: f"{name}: witness fails on the one-element model")
    group = builtin("group")
    broken = BitWitness(group.witness.zero, (parse_term("mul(x1,x2)", group.sig),), group.witness.theta)
    report = verify_witness(group.model("S3"), broken, budget)
    run.check(not report.ok and all(f.assignment for f in report.failures),
              lambda: "a squaring alpha passed on S3")


def loop_identities_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        bad = failing_identities(alg, spec.identities, budget)
        run.check(not bad, lambda: f"{spec.name}/{alg.name}: {[f.identity for f in bad]}")


def term_roundtrip_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for name in BUILTINS:
        spec = builtin(name)
        for variant in Variant:
            for t in _termset(name, variant).terms:
                text = print_term(t)
                run.check(parse_term(text, spec.sig) == t and not validate_term(spec.sig, t),
                          lambda: f"{name}: {text}")


def congruence_lattice_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        lattice = all_congruences(alg, budget)
        members = set(lattice)
        run.check(lattice[0] == Partition.discrete(alg.size) and lattice[-1] == Partition.total(alg.size),
                  lambda: f"{alg.name}: lattice does not run from the discrete to the total partition")
        for p in lattice:
            run.check(compatibility_failure(alg, p) is None, lambda: f"{alg.name}: {p.as_lists()} is not compatible")
        for p in lattice:
            for q in lattice:
                run.check(p.join(q) in members, lambda: f"{alg.name}: join of {p.as_lists()} and {q.as_lists()}")
    for variety, model in SIMPLE_MODELS:
        count = len(all_congruences(builtin(variety).model(model), budget))
        run.check(count == 2, lambda: f"{model}: expected 2 congruences, found {count}")
    for name in BUILTINS:
        count = len(all_congruences(trivial_model(builtin(name).sig), budget))
        run.check(count == 1, lambda: f"{name}: the one-element model has {count} congruences")


def census_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for (variety, model), expected in CENSUS.items():
        spec = builtin(variety)
        alg = spec.model(model)
        found = len(list_ideals(alg, zero_element(alg, spec.witness), budget))
        run.check(found == expected, lambda: f"{variety}/{model}: expected {expected} ideals, found {found}")
    for filename, variety, model in FIXTURES:
        spec = builtin(variety)
        path = os.path.join(data_dir, filename)
        try:
            loaded = load_algebra_file(path, spec.sig)
        except (BitError, OSError) as exc:
            run.check(False, lambda: f"{filename}: {exc}")
            continue
        bundled = spec.model(model)
        same = loaded.size == bundled.size and all(
            loaded.flat_table(s) == bundled.flat_table(s) for s in spec.sig.symbols
        )
        run.check(same, lambda: f"{filename}: tables differ from the bundled {model}")
        if (variety, model) in CENSUS:
            found = len(list_ideals(loaded, zero_element(loaded, spec.witness), budget))
            run.check(found == CENSUS[variety, model], lambda: f"{filename}: {found} ideals")


def termset_soundness_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        zero = zero_element(alg, spec.witness)
        for variant in Variant:
            for semiabelian in {False, spec.semiabelian}:
                for t in _termset(spec.name, variant, semiabelian).terms:
                    run.check(is_zero_ideal_term(alg, zero, t, budget),
                              lambda: f"{spec.name}/{alg.name}: {print_term(t)} is not a 0-ideal term")


def determining_power_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for ref in REFERENCE_SETS:
        spec = builtin(ref.variety)
        reference, generated = ref.termset(), ref.generated()
        for alg in spec.bundled:
            for H in subset_sweep(alg.size):
                a = closed_under(alg, generated, H, budget).holds
                b = closed_under(alg, reference, H, budget).holds
                run.check(a == b, lambda: f"{ref.name} on {_where(alg, H)}: generated {a}, reference {b}")


def variant_independence_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        sets = [_termset(spec.name, v) for v in Variant]
        for H in subset_sweep(alg.size):
            verdicts = [closed_under(alg, ts, H, budget).holds for ts in sets]
            run.check(len(set(verdicts)) == 1, lambda: f"{spec.name} {_where(alg, H)}: {verdicts}")


def equivalence_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        for H in subset_sweep(alg.size):
            report = build_ideal_report(alg, spec, H, ("all",), budget=budget)
            run.check(report.agreement, lambda: f"{spec.name} {_where(alg, H)}: {report.verdicts}")


def semiabelian_refinement_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        if not spec.semiabelian:
            continue
        for H in subset_sweep(alg.size):
            for cond in ("ii", "iii", "iv", "v"):
                plain = check_condition(alg, spec.witness, H, cond, False, budget).holds
                refined = check_condition(alg, spec.witness, H, cond, True, budget).holds
                run.check(plain == refined, lambda: f"{spec.name} {_where(alg, H)} cond-{cond}")
            for variant in Variant:
                plain = closed_under(alg, _termset(spec.name, variant), H, budget).holds
                refined = closed_under(alg, _termset(spec.name, variant, True), H, budget).holds
                run.check(plain == refined, lambda: f"{spec.name} {_where(alg, H)} termset-{variant.value}")


def class_image_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        w = spec.witness
        zero = zero_element(alg, w)
        for H in subset_sweep(alg.size):
            if zero not in H:
                continue
            for a in range(alg.size):
                run.check(eq_class(alg, w, H, a) <= theta_image(alg, w, H, a),
                          lambda: f"{_where(alg, H)}: class of {a} leaves its image")


def zero_image_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        w = spec.witness
        zero = zero_element(alg, w)
        for H in subset_sweep(alg.size):
            if closed_under_theta_alpha_zero(alg, w, H, budget):
                run.check(theta_image(alg, w, H, zero) == H, lambda: f"{_where(alg, H)}: image of zero differs")


def inclusion_split_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        w = spec.witness
        zero = zero_element(alg, w)
        for H in subset_sweep(alg.size):
            left = theta_alpha_inclusion(alg, w, H, budget)
            right = classes_are_images(alg, w, H) and related_alphas_inside(alg, w, H)
            run.check(left == right, lambda: f"{_where(alg, H)}: inclusion {left}, split {right}")
            if left:
                run.check(zero in H, lambda: f"{_where(alg, H)}: inclusion holds without the zero")


def kernel_relation_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        w = spec.witness
        zero = zero_element(alg, w)
        for H in list_ideals(alg, zero, budget):
            cong = congruence_for_kernel(alg, zero, H, budget)
            run.check(cong == sim_relation(alg, w, H), lambda: f"{_where(alg, H)}: ~H is not the kernel congruence")
            for a in range(alg.size):
                for b in range(alg.size):
                    rel = kernel_relation_check(alg, w, H, a, b, budget)
                    run.check(rel.consistent, lambda: f"{_where(alg, H)} ({a},{b}): {rel.model_dump()}")


def counterexample_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    spec = builtin("group")
    s3 = spec.model("S3")
    H = frozenset({0, 3})
    run.check(theta_alpha_inclusion(s3, spec.witness, H, budget), lambda: "{e,(12)} fails the inclusion")
    report = build_ideal_report(s3, spec, H, ("all",), budget=budget)
    run.check(not any(report.verdicts.values()), lambda: f"{{e,(12)}} accepted by {report.verdicts}")
    found = [
        (alg.name, H) for alg in spec.bundled for H in subset_sweep(alg.size)
        if theta_alpha_inclusion(alg, spec.witness, H, budget) and not is_ideal_oracle(alg, 0, H, budget)
    ]
    run.check(bool(found), lambda: "no group subset passes the inclusion without being an ideal")


def closure_minimality_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for spec, alg in _models():
        zero = zero_element(alg, spec.witness)
        ideals = list_ideals(alg, zero, budget)
        ts = _termset(spec.name, Variant.IV)
        for seed in [frozenset()] + subset_sweep(alg.size):
            closure = ideal_closure(alg, ts, seed, budget)
            least = reduce(frozenset.intersection, [I for I in ideals if seed <= I])
            run.check(closure == least,
                      lambda: f"{_where(alg, seed)}: closure {sorted(closure)}, least {sorted(least)}")


def extension_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for base_name, ext_name in EXTENSIONS:
        base, ext = builtin(base_name), builtin(ext_name)
        for alg in ext.bundled:
            zero = zero_element(alg, ext.witness)
            for mode in ExtensionMode:
                ts = extended_termset(base, ext, Variant.IV, mode)
                for H in subset_sweep(alg.size):
                    check = extension_ideal_check(alg, base, ext, H, mode, budget)
                    run.check(check.agree, lambda: f"{ext_name} {_where(alg, H)} mode {mode.value}: {check}")
                    direct = is_ideal_oracle(alg, zero, H, budget)
                    run.check(closed_under(alg, ts, H, budget).holds == direct,
                              lambda: f"{ext_name} {_where(alg, H)}: extended set disagrees in mode {mode.value}")


def same_signature_suite(run: _Run, budget: Budget, data_dir: str) -> None:
    for wide_name, narrow_name in SAME_SIGNATURE:
        wide, narrow = builtin(wide_name), builtin(narrow_name)
        run.check(wide.sig.ops == narrow.sig.ops, lambda: f"{narrow_name} has another signature than {wide_name}")
        sets = [_termset(wide_name, v) for v in Variant] + [r.termset() for r in reference_sets_for(wide_name)]
        for alg in narrow.bundled:
            bad = failing_identities(alg, wide.identities, budget)
            run.check(not bad, lambda: f"{narrow_name}/{alg.name} breaks {[f.identity for f in bad]}")
            zero = zero_element(alg, wide.witness)
            for H in subset_sweep(alg.size):
                direct = is_ideal_oracle(alg, zero, H, budget)
                for ts in sets:
                    got = closed_under(alg, ts, H, budget).holds
                    run.check(got == direct, lambda: f"{ts.label} on {narrow_name} {_where(alg, H)}: {got}")


SUITES: Dict[str, Suite] = {
    "witness": witness_suite,
    "loop-identities": loop_identities_suite,
    "term-roundtrip": term_roundtrip_suite,
    "congruence-lattice": congruence_lattice_suite,
    "census": census_suite,
    "termset-soundness": termset_soundness_suite,
    "determining-power": determining_power_suite,
    "variant-independence": variant_independence_suite,
    "equivalence": equivalence_suite,
    "semiabelian-refinement": semiabelian_refinement_suite,
    "class-image": class_image_suite,
    "zero-image": zero_image_suite,
    "inclusion-split": inclusion_split_suite,
    "kernel-relation": kernel_relation_suite,
    "counterexample": counterexample_suite,
    "closure-minimality": closure_minimality_suite,
    "extension": extension_suite,
    "same-signature": same_signature_suite,
}

# names of the underlying results, each standing for the suites that exercise it
SUITE_ALIASES: Dict[str, Tuple[str, ...]] = {
    "lemma22": ("class-image",),
    "lemma23": ("zero-image",),
    "lemma24": ("inclusion-split",),
    "prop21": ("kernel-relation",),
    "thm25": ("equivalence", "semiabelian-refinement", "counterexample"),
    "thm26": ("termset-soundness", "determining-power", "variant-independence", "closure-minimality"),
    "cor28": ("same-signature",),
    "cor29": ("extension",),
    "cor210": ("same-signature",),
}


def select_suites(names: Optional[Iterable[str]]) -> List[str]:
    """Registry order; an alias expands to its suites."""
    if not names:
        return list(SUITES)
    wanted = set()
    unknown = []
    for n in (n.strip() for n in names):
        if not n:
            continue
        if n in SUITES:
            wanted.add(n)
        elif n in SUITE_ALIASES:
            wanted.update(SUITE_ALIASES[n])
        else:
            unknown.append(n)
    if unknown:
        raise ValueError(f"unknown suite {', '.join(unknown)}; available: {', '.join([*SUITES, *SUITE_ALIASES])}")
    return [n for n in SUITES if n in wanted]


def run_selftest(names: Optional[Iterable[str]] = None, budget_limit: Optional[int] = None,
                 data_dir: Optional[str] = None) -> List[SuiteResult]:
    data_dir = data_dir or config.DATA_DIR
    results = []
    for name in select_suites(names):
        run = _Run(name)
        budget = Budget(budget_limit if budget_limit is not None else config.BUDGET)
        try:
            SUITES[name](run, budget, data_dir)
        except BitError as exc:
            logger.exception("suite %s aborted", name)
            run.result.failures.append(f"aborted: {exc}")
        status = "ok" if run.result.passed else f"{len(run.result.failures)} failures"
        logger.info("suite %s: %d checks, %s", name, run.result.checked, status)
        results.append(run.result)
    return results
