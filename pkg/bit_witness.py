# bit_witness.py
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

import bundled_models
import config
from errors import AlgebraFormatError, Budget, SignatureError, UnknownVariety
from finite_algebra import FiniteAlgebra, eval_term, holds_identity
from term_core import (
    Signature, Term, Var, instantiate, is_ground, parse_term, print_term, validate_term, vars_of, x,
)

logger = logging.getLogger("bit_witness")


@dataclass(frozen=True)
class BitWitness:
    """zero, alpha_1..alpha_n (in x1, x2) and theta (in x1..x(n+1), base element last)."""

    zero: Term
    alphas: Tuple[Term, ...]
    theta: Term

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        if not self.alphas:
            raise SignatureError("a witness needs at least one alpha term")
        if not is_ground(self.zero):
            raise SignatureError(f"zero term {print_term(self.zero)} must be ground")
        for i, a in enumerate(self.alphas, start=1):
            vs = vars_of(a)
            if vs.yvars or not vs.xvars <= {1, 2}:
                raise SignatureError(f"alpha{i} may only use x1, x2")
        vs = vars_of(self.theta)
        if vs.yvars or not vs.xvars <= set(range(1, self.n + 2)):
            raise SignatureError(f"theta may only use x1..x{self.n + 1}")

    @property
    def n(self) -> int:
        return len(self.alphas)

    def alpha(self, i: int, a: Term, b: Term) -> Term:
        return instantiate(self.alphas[i - 1], [a, b])

    def theta_of(self, args: Sequence[Term], base: Term) -> Term:
        return instantiate(self.theta, list(args) + [base])

    def validate(self, sig: Signature) -> List[str]:
        out = []
        for label, t in self.labelled_terms():
            out.extend(f"{label}: {v}" for v in validate_term(sig, t))
        return out

    def labelled_terms(self) -> List[Tuple[str, Term]]:
        return [("zero", self.zero)] + [(f"alpha{i}", a) for i, a in enumerate(self.alphas, start=1)] + \
            [("theta", self.theta)]


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class VarietySpec:
    name: str
    sig: Signature
    witness: BitWitness
    semiabelian: bool = True
    bundled: Tuple[FiniteAlgebra, ...] = ()
    identities: Tuple[Identity, ...] = ()

    def __post_init__(self):
        problems = self.witness.validate(self.sig)
        if problems:
            raise SignatureError(f"witness not valid over {self.sig.name}: {'; '.join(problems)}")

    def model(self, name: str) -> FiniteAlgebra:
        for alg in self.bundled:
            if alg.name == name:
                return alg
        raise UnknownVariety(f"{self.name}/{name}")


# ---------- verification ----------

class IdentityFailure(BaseModel):
    identity: str
    assignment: Dict[str, int]


class WitnessReport(BaseModel):
    algebra: str
    ok: bool
    failures: List[IdentityFailure] = []


def witness_identities(w: BitWitness) -> List[Tuple[str, Term, Term]]:
    x1, x2 = x(1), x(2)
    out = [(f"alpha{i}(x,x)=0", w.alpha(i, x1, x1), w.zero) for i in range(1, w.n + 1)]
    out.append(("theta(alpha(x,y),y)=x", w.theta_of([w.alpha(i, x1, x2) for i in range(1, w.n + 1)], x2), x1))
    out.append(("theta(0,...,0,a)=a", w.theta_of([w.zero] * w.n, x1), x1))
    return out


def verify_witness(alg: FiniteAlgebra, w: BitWitness, budget: Optional[Budget] = None) -> WitnessReport:
    budget = budget if budget is not None else Budget(config.BUDGET)
    failures = []
    for label, lhs, rhs in witness_identities(w):
        check = holds_identity(alg, lhs, rhs, budget)
        if not check.holds:
            failures.append(IdentityFailure(identity=label, assignment=check.counter))
    if failures:
        logger.info("witness fails on %s: %s", alg.name, ", ".join(f.identity for f in failures))
    return WitnessReport(algebra=alg.name, ok=not failures, failures=failures)


class WitnessSummary(BaseModel):
    variety: str
    ok: bool
    reports: List[WitnessReport]


def verify_variety(spec: VarietySpec, algebras: Optional[Sequence[FiniteAlgebra]] = None,
                   budget: Optional[Budget] = None) -> WitnessSummary:
    """Verify the witness on the given algebras, or on every bundled model of the variety."""
    budget = budget if budget is not None else Budget(config.BUDGET)
    algebras = spec.bundled if algebras is None else algebras
    reports = [verify_witness(alg, spec.witness, budget) for alg in algebras]
    return WitnessSummary(variety=spec.name, ok=all(r.ok for r in reports), reports=reports)


def zero_element(alg: FiniteAlgebra, w: BitWitness) -> int:
    return eval_term(alg, w.zero)


def failing_identities(alg: FiniteAlgebra, identities: Iterable[Identity],
                       budget: Optional[Budget] = None) -> List[IdentityFailure]:
    budget = budget if budget is not None else Budget(config.BUDGET)
    out = []
    for ident in identities:
        check = holds_identity(alg, ident.lhs, ident.rhs, budget)
        if not check.holds:
            out.append(IdentityFailure(identity=ident.name, assignment=check.counter))
    return out


def extend_signature(base: VarietySpec, extra: Iterable[Tuple[str, int]], name: Optional[str] = None,
                     bundled: Sequence[FiniteAlgebra] = (), identities: Sequence[Identity] = ()) -> VarietySpec:
    sig = base.sig.extend(extra, name)
    return VarietySpec(
        name=name or sig.name,
        sig=sig,
        witness=base.witness,
        semiabelian=base.semiabelian,
        bundled=tuple(bundled),
        identities=base.identities + tuple(identities),
    )


# ---------- builtin varieties ----------

def _identities(sig: Signature, pairs: Sequence[Tuple[str, str, str]]) -> Tuple[Identity, ...]:
    return tuple(Identity(name, parse_term(lhs, sig), parse_term(rhs, sig)) for name, lhs, rhs in pairs)


GROUP_LAWS = [
    ("associativity", "mul(mul(x1,x2),x3)", "mul(x1,mul(x2,x3))"),
    ("left unit", "mul(e,x1)", "x1"),
    ("right unit", "mul(x1,e)", "x1"),
    ("inverse", "mul(x1,inv(x1))", "e"),
]

ADDITIVE_LAWS = [
    ("add associativity", "add(add(x1,x2),x3)", "add(x1,add(x2,x3))"),
    ("add commutativity", "add(x1,x2)", "add(x2,x1)"),
    ("add unit", "add(x1,zero)", "x1"),
    ("negation", "add(x1,neg(x1))", "zero"),
]

RING_LAWS = ADDITIVE_LAWS + [
    ("mul associativity", "mul(mul(x1,x2),x3)", "mul(x1,mul(x2,x3))"),
    ("left distributivity", "mul(x1,add(x2,x3))", "add(mul(x1,x2),mul(x1,x3))"),
    ("right distributivity", "mul(add(x1,x2),x3)", "add(mul(x1,x3),mul(x2,x3))"),
]

# x/x=e, (x/y)y=x, (xy)/y=x, y(y\x)=x, y\(yx)=x, x\x=e
LOOP_LAWS = [
    ("right division unit", "rdiv(x1,x1)", "e"),
    ("right division cancels", "mul(rdiv(x1,x2),x2)", "x1"),
    ("right multiplication cancels", "rdiv(mul(x1,x2),x2)", "x1"),
    ("left division cancels", "mul(x2,ldiv(x2,x1))", "x1"),
    ("left multiplication cancels", "ldiv(x2,mul(x2,x1))", "x1"),
    ("left division unit", "ldiv(x1,x1)", "e"),
]

COMMUTATIVITY = [("commutativity", "mul(x1,x2)", "mul(x2,x1)")]

OMEGA_UNIT = [("operator fixes unit", "omega(e,e)", "e")]

GROUP_OPS = (("e", 0), ("mul", 2), ("inv", 1))
ADDITIVE_OPS = (("zero", 0), ("add", 2), ("neg", 1))
LOOP_OPS = (("e", 0), ("mul", 2), ("rdiv", 2), ("ldiv", 2))
SEMILOOP_OPS = (("e", 0), ("mul", 2), ("rdiv", 2))


def _witness(sig: Signature, zero: str, alpha: str, theta: str) -> BitWitness:
    return BitWitness(parse_term(zero, sig), (parse_term(alpha, sig),), parse_term(theta, sig))


def _group() -> VarietySpec:
    sig = Signature("group", GROUP_OPS)
    return VarietySpec("group", sig, _witness(sig, "e", "mul(x1,inv(x2))", "mul(x1,x2)"), True,
                       tuple(bundled_models.group_models(sig)), _identities(sig, GROUP_LAWS))


def _abelian_group() -> VarietySpec:
    # same signature as group, one more law
    group = builtin("group")
    return VarietySpec("abelian_group", group.sig, group.witness, True,
                       tuple(group.model(m) for m in ("Z4", "V4")),
                       group.identities + _identities(group.sig, COMMUTATIVITY))


def _additive_group() -> VarietySpec:
    sig = Signature("additive_group", ADDITIVE_OPS)
    models = [bundled_models.cyclic_ring(n, sig) for n in (4, 6)]
    return VarietySpec("additive_group", sig, _witness(sig, "zero", "add(x1,neg(x2))", "add(x1,x2)"), True,
                       tuple(models), _identities(sig, ADDITIVE_LAWS))


def _ring() -> VarietySpec:
    base = builtin("additive_group")
    spec = extend_signature(base, [("mul", 2)], "ring")
    return VarietySpec("ring", spec.sig, spec.witness, True, tuple(bundled_models.ring_models(spec.sig)),
                       _identities(spec.sig, RING_LAWS))


def _loop() -> VarietySpec:
    sig = Signature("loop", LOOP_OPS)
    return VarietySpec("loop", sig, _witness(sig, "e", "rdiv(x1,x2)", "mul(x1,x2)"), True,
                       tuple(bundled_models.loop_models(sig)), _identities(sig, LOOP_LAWS))


def _semiloop() -> VarietySpec:
    sig = Signature("semiloop", SEMILOOP_OPS)
    return VarietySpec("semiloop", sig, _witness(sig, "e", "rdiv(x1,x2)", "mul(x1,x2)"), True,
                       tuple(bundled_models.semiloop_models(sig)), _identities(sig, LOOP_LAWS[:3]))


def _div_inv_groupoid() -> VarietySpec:
    sig = Signature("div_inv_groupoid", SEMILOOP_OPS)
    return VarietySpec("div_inv_groupoid", sig, _witness(sig, "e", "rdiv(x1,x2)", "mul(x1,x2)"), True,
                       tuple(bundled_models.divisible_groupoid_models(sig)), _identities(sig, LOOP_LAWS[:2]))


def _omega_group_demo() -> VarietySpec:
    spec = extend_signature(builtin("group"), [("omega", 2)], "omega_group")
    return VarietySpec("omega_group_demo", spec.sig, spec.witness, True,
                       tuple(bundled_models.omega_group_models(spec.sig)),
                       spec.identities + _identities(spec.sig, OMEGA_UNIT))


def _omega_loop_demo() -> VarietySpec:
    spec = extend_signature(builtin("loop"), [("omega", 2)], "omega_loop")
    return VarietySpec("omega_loop_demo", spec.sig, spec.witness, True,
                       tuple(bundled_models.omega_loop_models(spec.sig)),
                       spec.identities + _identities(spec.sig, OMEGA_UNIT))


BUILTINS: Dict[str, Callable[[], VarietySpec]] = {
    "group": _group,
    "abelian_group": _abelian_group,
    "ring": _ring,
    "loop": _loop,
    "semiloop": _semiloop,
    "div_inv_groupoid": _div_inv_groupoid,
    "omega_group_demo": _omega_group_demo,
    "omega_loop_demo": _omega_loop_demo,
    "additive_group": _additive_group,
}


@lru_cache(maxsize=None)
def builtin(name: str) -> VarietySpec:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise UnknownVariety(name) from None
    spec = factory()
    logger.debug("built variety %s with %d bundled models", name, len(spec.bundled))
    return spec


# ---------- .sig files ----------

def parse_signature(text: str) -> VarietySpec:
    name = None
    ops: List[Tuple[str, int]] = []
    n = None
    raw: Dict[str, str] = {}
    semiabelian = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "signature":
            name = rest.strip()
        elif head == "op":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise AlgebraFormatError(f"line {lineno}: expected 'op <sym> <arity>'")
            ops.append((parts[0], int(parts[1])))
        elif head == "witness":
            key, _, value = rest.strip().partition("=")
            if key != "n" or not value.isdigit() or int(value) < 1:
                raise AlgebraFormatError(f"line {lineno}: expected 'witness n=<n>'")
            n = int(value)
        elif ":" in line:
            key, _, value = line.partition(":")
            key = key.strip()
            if key == "semiabelian":
                semiabelian = value.strip().lower() in ("1", "true", "yes")
            else:
                raw[key] = value.strip()
        else:
            raise AlgebraFormatError(f"line {lineno}: cannot parse {line!r}")
    if name is None or n is None:
        raise AlgebraFormatError("signature file needs 'signature <Name>' and 'witness n=<n>' lines")
    sig = Signature(name, tuple(ops))
    missing = [k for k in ["zero", "theta"] + [f"alpha{i}" for i in range(1, n + 1)] if k not in raw]
    if missing:
        raise AlgebraFormatError(f"signature {name}: missing witness lines {', '.join(missing)}")
    witness = BitWitness(
        parse_term(raw["zero"], sig),
        tuple(parse_term(raw[f"alpha{i}"], sig) for i in range(1, n + 1)),
        parse_term(raw["theta"], sig),
    )
    if semiabelian is None:
        semiabelian = sig.constants == (_head_symbol(witness.zero),)
    return VarietySpec(name, sig, witness, semiabelian)


def _head_symbol(t: Term) -> Optional[str]:
    return None if isinstance(t, Var) else t.symbol


def load_signature_file(path: str) -> VarietySpec:
    with open(path, encoding="utf-8") as fh:
        spec = parse_signature(fh.read())
    logger.info("loaded signature %s (%d ops) from %s", spec.sig.name, len(spec.sig.ops), path)
    return spec


def dump_signature(spec: VarietySpec) -> str:
    lines = [f"signature {spec.sig.name}"]
    lines += [f"op {s} {a}" for s, a in spec.sig.ops]
    w = spec.witness
    lines.append(f"witness n={w.n}")
    lines.append(f"zero: {print_term(w.zero)}")
    lines += [f"alpha{i}: {print_term(a)}" for i, a in enumerate(w.alphas, start=1)]
    lines.append(f"theta: {print_term(w.theta)}")
    return "\n".join(lines) + "\n"
