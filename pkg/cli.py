# cli.py
"""Command-line front end. JSON reports go to stdout, summaries and logs to stderr.

Exit codes: 0 true verdict or success, 1 false verdict, 2 input error, 3 budget exhausted.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from pydantic import BaseModel

import config
from bit_witness import VarietySpec, builtin, load_signature_file, verify_variety, zero_element
from errors import BitError, Budget, BudgetExceeded, UnknownVariety
from finite_algebra import FiniteAlgebra, Subset, all_congruences, kernel_of, load_algebra_file
from ideal_engine import (
    METHODS, ClosureReport, CongruenceReport, IdealList, build_ideal_report, ideal_closure,
    kernel_relation_check, list_ideals,
)
from selftest import SUITE_ALIASES, SUITES, SelftestReport, run_selftest
from term_core import term_depth
from termset_gen import (
    ExtensionMode, Variant, dedupe_semantic, dedupe_syntactic, extend_termset, gen_termset, render_termset,
)

logger = logging.getLogger("bit_cli")

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


# ---------- argument helpers ----------

def parse_subset(text: str) -> Subset:
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"subset must be comma-separated element indices, got {text!r}") from None


def parse_pair(text: str):
    parts = parse_subset_list(text)
    if len(parts) != 2:
        raise ValueError(f"--pair expects two elements a,b, got {text!r}")
    return parts


def parse_subset_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def resolve_variety(name: Optional[str], sig_path: Optional[str]) -> VarietySpec:
    if sig_path:
        return load_signature_file(sig_path)
    if not name:
        raise UnknownVariety("(none given; use --variety or --sig)")
    if name.endswith(".sig") or os.path.sep in name:
        return load_signature_file(_data_path(name))
    return builtin(name)


def _data_path(path: str) -> str:
    if os.path.exists(path):
        return path
    bundled = os.path.join(config.DATA_DIR, path)
    if os.path.exists(bundled):
        return bundled
    raise FileNotFoundError(f"no such file: {path}")


def resolve_algebra(spec: VarietySpec, ref: Optional[str]) -> FiniteAlgebra:
    """A file path, a file under the data directory, or the name of a bundled model."""
    if not ref:
        raise ValueError("--algebra is required for this command")
    if any(alg.name == ref for alg in spec.bundled) and not os.path.exists(ref):
        return spec.model(ref)
    return load_algebra_file(_data_path(ref), spec.sig)


def emit(model: BaseModel) -> None:
    sys.stdout.write(model.model_dump_json(indent=2, exclude_none=True) + "\n")


def summary(args, text: str) -> None:
    if args.verbose:
        sys.stderr.write(text + "\n")


# ---------- commands ----------

def cmd_verify_witness(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    algebras = [resolve_algebra(spec, args.algebra)] if args.algebra else None
    report = verify_variety(spec, algebras, budget)
    emit(report)
    for r in report.reports:
        summary(args, f"{r.algebra}: {'ok' if r.ok else ', '.join(f.identity for f in r.failures)}")
    return EXIT_TRUE if report.ok else EXIT_FALSE


def cmd_gen_terms(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    ts = gen_termset(spec, args.set, args.semiabelian)
    if args.extend:
        ext = resolve_variety(args.extend, None)
        ts = extend_termset(ts, ext, args.mode)
        spec = ext
    if args.unique:
        ts = dedupe_syntactic(ts)
    header = []
    if args.dedupe:
        alg = load_algebra_file(_data_path(args.dedupe), spec.sig)
        ts, merges = dedupe_semantic(ts, alg, budget)
        header = [f"# merged {m.merged} into {m.kept} on {alg.name}" for m in merges]
    sys.stdout.write("".join(line + "\n" for line in header) + render_termset(ts))
    summary(args, f"{ts.label}: {len(ts)} terms, depth up to {max(map(term_depth, ts.terms), default=0)}")
    return EXIT_TRUE


def cmd_check_ideal(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    alg = resolve_algebra(spec, args.algebra)
    methods = [m for chunk in args.method for m in chunk.split(",") if m]
    report = build_ideal_report(alg, spec, parse_subset(args.subset), methods or ["all"], args.semiabelian,
                                budget, timing=args.timing)
    emit(report)
    summary(args, ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in report.verdicts.items()))
    return EXIT_TRUE if report.agreement and all(report.verdicts.values()) else EXIT_FALSE


def cmd_ideal_closure(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    alg = resolve_algebra(spec, args.algebra)
    seed = parse_subset(args.subset or "")
    ts = gen_termset(spec, args.set, args.semiabelian)
    closure = ideal_closure(alg, ts, seed, budget)
    emit(ClosureReport(algebra=alg.name, seed=sorted(seed), termset=ts.label, closure=sorted(closure)))
    summary(args, f"closure of {sorted(seed)} in {alg.name}: {sorted(closure)}")
    return EXIT_TRUE


def cmd_list_ideals(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    alg = resolve_algebra(spec, args.algebra)
    ideals = list_ideals(alg, zero_element(alg, spec.witness), budget)
    emit(IdealList(algebra=alg.name, count=len(ideals), ideals=[sorted(I) for I in ideals]))
    summary(args, f"{alg.name}: {len(ideals)} ideals")
    return EXIT_TRUE


def cmd_congruences(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    alg = resolve_algebra(spec, args.algebra)
    zero = zero_element(alg, spec.witness)
    lattice = all_congruences(alg, budget)
    emit(CongruenceReport(algebra=alg.name, count=len(lattice), congruences=[p.as_lists() for p in lattice],
                          kernels=[sorted(kernel_of(p, zero)) for p in lattice]))
    summary(args, f"{alg.name}: {len(lattice)} congruences")
    return EXIT_TRUE


def cmd_kernel_relation(args, budget: Budget) -> int:
    spec = resolve_variety(args.variety, args.sig)
    alg = resolve_algebra(spec, args.algebra)
    a, b = parse_pair(args.pair)
    for e in (a, b):
        if not 0 <= e < alg.size:
            raise ValueError(f"element {e} is outside the carrier of {alg.name}")
    rel = kernel_relation_check(alg, spec.witness, parse_subset(args.subset), a, b, budget)
    if not rel.consistent:
        logger.warning("descriptions of the relation disagree for (%d, %d) on %s", a, b, alg.name)
    emit(rel)
    return EXIT_TRUE if rel.consistent and rel.congruent else EXIT_FALSE


def cmd_selftest(args, budget: Budget) -> int:
    names = [n for chunk in args.filter for n in chunk.split(",")] if args.filter else None
    results = run_selftest(names, budget.limit)
    report = SelftestReport(suites=results)
    emit(report)
    for r in results:
        summary(args, f"{r.name}: {r.checked} checks, {'ok' if r.passed else 'FAILED'}")
        for f in r.failures[:5]:
            summary(args, f"  {f}")
    return EXIT_TRUE if report.passed else EXIT_FALSE


COMMANDS = {
    "verify-witness": cmd_verify_witness,
    "gen-terms": cmd_gen_terms,
    "check-ideal": cmd_check_ideal,
    "ideal-closure": cmd_ideal_closure,
    "list-ideals": cmd_list_ideals,
    "congruences": cmd_congruences,
    "kernel-relation": cmd_kernel_relation,
    "prop21": cmd_kernel_relation,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="cap on term evaluations (default BIT_BUDGET)")
    common.add_argument("--verbose", action="store_true", help="print a human summary on stderr")

    variety = argparse.ArgumentParser(add_help=False)
    source = variety.add_mutually_exclusive_group()
    source.add_argument("--variety", default=None, help="builtin variety name")
    source.add_argument("--sig", default=None, help="signature file with a witness")

    algebra = argparse.ArgumentParser(add_help=False)
    algebra.add_argument("--algebra", default=None, help=".alg file, or the name of a bundled model")

    termset = argparse.ArgumentParser(add_help=False)
    termset.add_argument("--set", default="iv", choices=[v.value for v in Variant])
    termset.add_argument("--semiabelian", action="store_true", help="use the subalgebra form of the closure clauses")

    parser = argparse.ArgumentParser(prog="bit", description="Ideals in varieties with BIT speciale terms")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-witness", parents=[common, variety, algebra])

    p = sub.add_parser("gen-terms", parents=[common, variety, termset])
    p.add_argument("--extend", default=None, help="variety whose extra operations are added")
    p.add_argument("--mode", default="a", choices=[m.value for m in ExtensionMode])
    p.add_argument("--unique", action="store_true", help="drop structural duplicates")
    p.add_argument("--dedupe", default=None, metavar="FILE", help="merge terms equal as functions on this algebra")

    p = sub.add_parser("check-ideal", parents=[common, variety, algebra])
    p.add_argument("--subset", required=True)
    p.add_argument("--method", action="append", default=[],
                   help=f"all or any of {', '.join(METHODS)}; repeatable or comma-separated")
    p.add_argument("--semiabelian", action="store_true")
    p.add_argument("--timing", action="store_true", help="include elapsed_ms in the report")

    p = sub.add_parser("ideal-closure", parents=[common, variety, algebra, termset])
    p.add_argument("--subset", default="", help="seed elements")

    sub.add_parser("list-ideals", parents=[common, variety, algebra])
    sub.add_parser("congruences", parents=[common, variety, algebra])

    p = sub.add_parser("kernel-relation", aliases=["prop21"], parents=[common, variety, algebra])
    p.add_argument("--subset", required=True, help="an ideal")
    p.add_argument("--pair", required=True, help="two elements a,b")

    p = sub.add_parser("selftest", parents=[common])
    p.add_argument("--filter", action="append", default=[],
                   help=f"suites to run: {', '.join(SUITES)}; or by result: {', '.join(SUITE_ALIASES)}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr)
    budget = Budget(args.budget if args.budget is not None else config.BUDGET)
    try:
        return COMMANDS[args.command](args, budget)
    except BudgetExceeded as exc:
        logger.error("%s: %s", args.command, exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except (BitError, ValueError, OSError) as exc:
        logger.warning("%s rejected input: %s", args.command, exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
