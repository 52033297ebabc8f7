# termset_gen.py
"""Mechanical construction of determining ideal-term sets from a witness.

Clause tags used in provenance, with the numbered label printed in rendered output:
  theta-closure   (2.14) (2.16) (2.17) (2.19)  theta(y1,...,yn,y(n+1))
  alpha-closure   (2.14)                       alpha_i(y1,y2)
  alpha-zero      (2.16) (2.17) (2.19)         alpha_i(y1,0)
  zero            (2.16)                       the constant 0
  lifted-op       (2.15)                       alpha_i(tau(theta(y..,x1),...,theta(y..,xk)), tau(x1,...,xk))
  alpha-shift     (2.18)                       alpha_i(theta(y1..yn,x1), theta(y(n+1)..y2n,x1))
  single-slot     (2.20)                       alpha_i(tau(x1,..,theta(y1..yn,xj),..,xk), tau(x1,...,xk))
  subalgebra-op   (2.21)                       tau(y1,...,yk)
The head clauses take the label of the variant they open.
The y-slot y_{j,l} of the j-th lifted argument is flattened to y((j-1)*n+l).
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from bit_witness import BitWitness, VarietySpec
from errors import Budget, SignatureError
from finite_algebra import FiniteAlgebra, assignment_grid, eval_grid
from term_core import App, Signature, Term, Var, print_term, term_depth, vars_of_all, x, y

logger = logging.getLogger("bit_termset")


class Variant(str, Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"


class ExtensionMode(str, Enum):
    A = "a"
    B = "b"


@dataclass(frozen=True)
class Provenance:
    clause: str
    tau: Optional[str] = None
    i: Optional[int] = None
    j: Optional[int] = None
    ignorable: bool = False
    label: Optional[str] = None

    def _details(self) -> List[str]:
        parts = []
        if self.tau is not None:
            parts.append(f"tau={self.tau}")
        if self.i is not None:
            parts.append(f"i={self.i}")
        if self.j is not None:
            parts.append(f"j={self.j}")
        if self.ignorable:
            parts.append("ignorable=yes")
        return parts

    def describe(self) -> str:
        return " ".join([self.clause] + self._details())

    def comment(self) -> str:
        return "# " + " ".join([f"clause={self.label or self.clause}"] + self._details())


# numbered labels of the head clauses, by the variant they open
HEAD_LABELS = {"i": "(2.14)", "ii": "(2.16)", "iii": "(2.17)", "iv": "(2.19)"}
LIFTED_LABEL = "(2.15)"
SHIFT_LABEL = "(2.18)"
SLOT_LABEL = "(2.20)"
SUBALGEBRA_LABEL = "(2.21)"


@dataclass(frozen=True)
class TermSet:
    variant: Optional[Variant]
    semiabelian: bool
    terms: Tuple[Term, ...]
    provenance: Tuple[Provenance, ...]
    sig: Signature
    witness: BitWitness
    label: str = ""

    def __len__(self):
        return len(self.terms)

    def items(self) -> List[Tuple[Term, Provenance]]:
        return list(zip(self.terms, self.provenance))

    def replace(self, pairs: Sequence[Tuple[Term, Provenance]], **changes) -> "TermSet":
        fields = dict(variant=self.variant, semiabelian=self.semiabelian, sig=self.sig,
                      witness=self.witness, label=self.label)
        fields.update(changes)
        return TermSet(terms=tuple(t for t, _ in pairs), provenance=tuple(p for _, p in pairs), **fields)


# An operation usable as tau: name, arity and a builder from argument terms.
@dataclass(frozen=True)
class _Tau:
    name: str
    arity: int
    build: Callable[[Sequence[Term]], Term] = field(compare=False)


def _signature_taus(sig: Signature, symbols: Optional[Sequence[str]] = None) -> List[_Tau]:
    out = []
    for sym, arity in sig.ops:
        if symbols is None or sym in symbols:
            out.append(_Tau(sym, arity, lambda args, s=sym: App(s, tuple(args))))
    return out


def _theta_tau(w: BitWitness) -> _Tau:
    return _Tau("theta", w.n + 1, lambda args: w.theta_of(args[:-1], args[-1]))


def _alpha_taus(w: BitWitness) -> List[_Tau]:
    return [_Tau(f"alpha{j}", 2, lambda args, j=j: w.alpha(j, args[0], args[1])) for j in range(1, w.n + 1)]


def _ys(start: int, count: int) -> List[Var]:
    return [y(k) for k in range(start, start + count)]


def _mark(t: Term, prov: Provenance) -> Tuple[Term, Provenance]:
    if isinstance(t, Var) and t.kind == "y":
        prov = replace(prov, ignorable=True)
    return t, prov


# ---------- clauses ----------

def theta_closure(w: BitWitness, label: Optional[str] = None) -> List[Tuple[Term, Provenance]]:
    return [_mark(w.theta_of(_ys(1, w.n), y(w.n + 1)), Provenance("theta-closure", label=label))]


def alpha_closure(w: BitWitness, label: Optional[str] = None) -> List[Tuple[Term, Provenance]]:
    return [_mark(w.alpha(i, y(1), y(2)), Provenance("alpha-closure", i=i, label=label))
            for i in range(1, w.n + 1)]


def alpha_zero(w: BitWitness, label: Optional[str] = None) -> List[Tuple[Term, Provenance]]:
    return [_mark(w.alpha(i, y(1), w.zero), Provenance("alpha-zero", i=i, label=label))
            for i in range(1, w.n + 1)]


def zero_clause(w: BitWitness, label: Optional[str] = None) -> List[Tuple[Term, Provenance]]:
    return [(w.zero, Provenance("zero", label=label))]


def lifted_op(w: BitWitness, taus: Sequence[_Tau]) -> List[Tuple[Term, Provenance]]:
    out = []
    n = w.n
    for tau in taus:
        lifted = [w.theta_of(_ys((j - 1) * n + 1, n), x(j)) for j in range(1, tau.arity + 1)]
        plain = [x(j) for j in range(1, tau.arity + 1)]
        for i in range(1, n + 1):
            t = w.alpha(i, tau.build(lifted), tau.build(plain))
            out.append(_mark(t, Provenance("lifted-op", tau=tau.name, i=i, label=LIFTED_LABEL)))
    return out


def alpha_shift(w: BitWitness) -> List[Tuple[Term, Provenance]]:
    n = w.n
    left = w.theta_of(_ys(1, n), x(1))
    right = w.theta_of(_ys(n + 1, n), x(1))
    return [_mark(w.alpha(i, left, right), Provenance("alpha-shift", i=i, label=SHIFT_LABEL))
            for i in range(1, n + 1)]


def single_slot(w: BitWitness, taus: Sequence[_Tau]) -> List[Tuple[Term, Provenance]]:
    out = []
    n = w.n
    for tau in taus:
        plain = [x(j) for j in range(1, tau.arity + 1)]
        for i in range(1, n + 1):
            for j in range(1, tau.arity + 1):
                args = list(plain)
                args[j - 1] = w.theta_of(_ys(1, n), x(j))
                t = w.alpha(i, tau.build(args), tau.build(plain))
                out.append(_mark(t, Provenance("single-slot", tau=tau.name, i=i, j=j, label=SLOT_LABEL)))
    return out


def subalgebra_ops(sig: Signature) -> List[Tuple[Term, Provenance]]:
    return [_mark(tau.build(_ys(1, tau.arity)), Provenance("subalgebra-op", tau=tau.name, label=SUBALGEBRA_LABEL))
            for tau in _signature_taus(sig)]


# ---------- generation ----------

def gen_termset(spec: VarietySpec, variant, use_semiabelian: bool = False) -> TermSet:
    variant = Variant(variant)
    if use_semiabelian and not spec.semiabelian:
        raise SignatureError(f"variety {spec.name} is not flagged semi-abelian")
    w, sig = spec.witness, spec.sig
    ops = _signature_taus(sig)

    label = HEAD_LABELS[variant.value]
    if use_semiabelian:
        head = subalgebra_ops(sig)
    elif variant is Variant.I:
        head = theta_closure(w, label) + alpha_closure(w, label)
    elif variant is Variant.II:
        head = zero_clause(w, label) + theta_closure(w, label) + alpha_zero(w, label)
    else:
        head = theta_closure(w, label) + alpha_zero(w, label)

    if variant is Variant.I:
        pairs = head + lifted_op(w, ops + [_theta_tau(w)])
    elif variant is Variant.II:
        pairs = head + lifted_op(w, ops + [_theta_tau(w)] + _alpha_taus(w))
    elif variant is Variant.III:
        pairs = head + alpha_shift(w) + lifted_op(w, ops)
    else:
        pairs = alpha_shift(w) + head + single_slot(w, ops)

    ts = TermSet(variant, use_semiabelian, tuple(t for t, _ in pairs), tuple(p for _, p in pairs), sig, w,
                 label=f"{spec.name}-{variant.value}{'-semiabelian' if use_semiabelian else ''}")
    logger.debug("generated %s: %d terms, depth up to %d", ts.label, len(ts), max(map(term_depth, ts.terms)))
    return ts


def extend_termset(base: TermSet, spec: VarietySpec, mode) -> TermSet:
    mode = ExtensionMode(mode)
    if not spec.sig.includes(base.sig):
        raise SignatureError(f"{spec.sig.name} does not extend {base.sig.name}")
    if spec.witness != base.witness:
        raise SignatureError(f"{spec.name} does not carry the witness of the base term set")
    new_symbols = [s for s in spec.sig.symbols if s not in base.sig.symbols]
    taus = _signature_taus(spec.sig, new_symbols)
    extra = lifted_op(base.witness, taus) if mode is ExtensionMode.A else single_slot(base.witness, taus)
    return base.replace(base.items() + extra, sig=spec.sig, label=f"{base.label}+{spec.name}-{mode.value}")


def dedupe_syntactic(ts: TermSet) -> TermSet:
    seen = set()
    kept = []
    for t, p in ts.items():
        if t in seen:
            continue
        seen.add(t)
        kept.append((t, p))
    if len(kept) < len(ts):
        logger.debug("syntactic dedupe of %s removed %d terms", ts.label, len(ts) - len(kept))
    return ts.replace(kept)


@dataclass(frozen=True)
class Merge:
    kept: str
    merged: str


def dedupe_semantic(ts: TermSet, alg: FiniteAlgebra, budget: Optional[Budget] = None) -> Tuple[TermSet, List[Merge]]:
    """Merge terms inducing the same function on alg, all variables ranging over the carrier.

    The merge only holds relative to alg; ideal checks never use the reduced set.
    """
    budget = budget if budget is not None else Budget(config.BUDGET)
    domains = [(v, alg.carrier) for v in vars_of_all(ts.terms).ordered()]
    env, shape = assignment_grid(domains)
    classes: Dict[bytes, Term] = {}
    kept, merges = [], []
    for t, p in ts.items():
        key = np.ascontiguousarray(eval_grid(alg, t, env, shape, budget)).tobytes()
        if key in classes:
            merges.append(Merge(print_term(classes[key]), print_term(t)))
            continue
        classes[key] = t
        kept.append((t, p))
    logger.info("semantic dedupe of %s on %s: %d classes, %d merges", ts.label, alg.name, len(kept), len(merges))
    return ts.replace(kept), merges


def render_termset(ts: TermSet) -> str:
    lines = []
    for t, p in ts.items():
        lines.append(p.comment())
        lines.append(print_term(t))
    return "\n".join(lines) + "\n"
