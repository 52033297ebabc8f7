# ideal_engine.py
"""Ideal decision on finite algebras of a variety with BIT speciale terms.

Subsets are frozensets of carrier indices. Every condition is evaluated by
exhaustive enumeration: elements ascending, terms in set order, so the first
failure found is reproducible.
"""
import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, computed_field

import config
from bit_witness import BitWitness, VarietySpec, zero_element
from errors import Budget, EmptySubset, NotAnIdeal, OracleInconsistency, SignatureError
from finite_algebra import (
    CompatibilityFailure, FiniteAlgebra, Partition, Subset, all_congruences, assignment_grid,
    compatibility_failure, eval_grid, grid_point, kernel_of, reduct,
)
from term_core import App, print_term, vars_of, x, y
from termset_gen import ExtensionMode, TermSet, Variant, extend_termset, gen_termset

logger = logging.getLogger("bit_ideal")

CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi", "vii")
METHODS = ("oracle",) + tuple(f"cond-{c}" for c in CONDITIONS) + tuple(f"termset-{v.value}" for v in Variant)


class FailureWitness(BaseModel):
    condition: str
    clause: str
    term: Optional[str] = None
    assignment: Dict[str, int] = {}
    value: Optional[int] = None


@dataclass(frozen=True)
class Verdict:
    holds: bool
    failure: Optional[FailureWitness] = None

    def __bool__(self):
        return self.holds


def _budget(budget: Optional[Budget]) -> Budget:
    return budget if budget is not None else Budget(config.BUDGET)


def _membership(size: int, H: Iterable[int]) -> np.ndarray:
    mask = np.zeros(size, dtype=bool)
    mask[list(H)] = True
    return mask


def _index(H: Iterable[int]) -> np.ndarray:
    return np.array(sorted(H), dtype=np.int64)


# ---------- witness tables ----------

@dataclass(frozen=True, eq=False)
class DerivedOps:
    """theta has shape (m,)*(n+1) with the base element on the last axis; each alpha is (m, m)."""

    zero: int
    theta: np.ndarray
    alphas: Tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.alphas)


@lru_cache(maxsize=128)
def derived_ops(alg: FiniteAlgebra, w: BitWitness) -> DerivedOps:
    domains = [(x(i), alg.carrier) for i in range(1, w.n + 2)]
    env, shape = assignment_grid(domains)
    theta = np.array(eval_grid(alg, w.theta, env, shape))
    env2, shape2 = assignment_grid(domains[:2])
    alphas = tuple(np.array(eval_grid(alg, a, env2, shape2)) for a in w.alphas)
    for arr in (theta,) + alphas:
        arr.setflags(write=False)
    return DerivedOps(zero_element(alg, w), theta, alphas)


def _tau_tables(alg: FiniteAlgebra, d: DerivedOps, symbols: Sequence[str] = None,
                with_theta: bool = False, with_alphas: bool = False) -> List[Tuple[str, np.ndarray]]:
    syms = alg.sig.symbols if symbols is None else symbols
    out = [(s, alg.tables[s]) for s in syms]
    if with_theta:
        out.append(("theta", d.theta))
    if with_alphas:
        out += [(f"alpha{j}", a) for j, a in enumerate(d.alphas, start=1)]
    return out


# ---------- theta-images and the relation ~H ----------

def _image_arrays(alg: FiniteAlgebra, w: BitWitness, H: Subset) -> List[np.ndarray]:
    if not H:
        return [np.empty(0, dtype=np.int64) for _ in range(alg.size)]
    d = derived_ops(alg, w)
    idx = _index(H)
    sub = d.theta[np.ix_(*([idx] * d.n))]
    cols = sub.reshape(-1, alg.size)
    return [np.unique(cols[:, a]) for a in range(alg.size)]


def theta_image(alg: FiniteAlgebra, w: BitWitness, H: Subset, a: int) -> Subset:
    return frozenset(int(v) for v in _image_arrays(alg, w, H)[a])


def theta_images(alg: FiniteAlgebra, w: BitWitness, H: Subset) -> List[Subset]:
    return [frozenset(int(v) for v in img) for img in _image_arrays(alg, w, H)]


def sim_relation(alg: FiniteAlgebra, w: BitWitness, H: Subset) -> Partition:
    if not H:
        raise EmptySubset("the relation ~H needs a nonempty subset")
    keys: Dict[Subset, int] = {}
    labels = [keys.setdefault(img, len(keys)) for img in theta_images(alg, w, H)]
    return Partition.from_labels(labels)


def eq_class(alg: FiniteAlgebra, w: BitWitness, H: Subset, a: int) -> Subset:
    return frozenset(sim_relation(alg, w, H).block_of(a))


def is_congruence(alg: FiniteAlgebra, p: Partition) -> Tuple[bool, Optional[CompatibilityFailure]]:
    failure = compatibility_failure(alg, p)
    return failure is None, failure


# ---------- enumeration helpers ----------

def _escape(vals, mask: np.ndarray, axes: Sequence[Tuple[str, np.ndarray]],
            budget: Budget) -> Optional[Tuple[Dict[str, int], int]]:
    """First entry of vals outside the subset, with its coordinates named after axes."""
    vals = np.asarray(vals)
    budget.charge(max(vals.size, 1))
    if vals.ndim == 0:
        return None if mask[int(vals)] else ({}, int(vals))
    bad = np.argwhere(~mask[vals])
    if len(bad) == 0:
        return None
    point = bad[0]
    assignment = {}
    for (name, values), k in zip(axes, point):
        assignment[name] = int(values[k])
    return assignment, int(vals[tuple(point)])


def _miss(condition: str, clause: str, found, **extra) -> Optional[FailureWitness]:
    if found is None:
        return None
    assignment, value = found
    assignment = {**extra, **assignment}
    return FailureWitness(condition=condition, clause=clause, assignment=assignment, value=value)


def _image_pairs(images: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs (a, u) with u in the theta-image of a, as two aligned arrays."""
    owners = np.concatenate([np.full(len(img), a, dtype=np.int64) for a, img in enumerate(images)])
    members = np.concatenate(images).astype(np.int64)
    return owners, members


# ---------- closure clauses ----------

def _zero_clause(cond, d, mask, budget):
    budget.charge(1)
    if mask[d.zero]:
        return None
    return FailureWitness(condition=cond, clause="zero", value=d.zero)


def _theta_closure(cond, d, idx, mask, budget):
    vals = d.theta[np.ix_(*([idx] * (d.n + 1)))]
    axes = [(f"h{k}", idx) for k in range(1, d.n + 2)]
    return _miss(cond, "theta-closure", _escape(vals, mask, axes, budget))


def _alpha_closure(cond, d, idx, mask, budget):
    for i, alpha in enumerate(d.alphas, start=1):
        found = _escape(alpha[np.ix_(idx, idx)], mask, [("h1", idx), ("h2", idx)], budget)
        if found:
            return _miss(cond, "alpha-closure", found, i=i)
    return None


def _alpha_zero(cond, d, idx, mask, budget):
    for i, alpha in enumerate(d.alphas, start=1):
        found = _escape(alpha[idx, d.zero], mask, [("h1", idx)], budget)
        if found:
            return _miss(cond, "alpha-zero", found, i=i)
    return None


def _subalgebra(cond, alg, idx, mask, budget):
    for sym, arity in alg.sig.ops:
        table = alg.tables[sym]
        vals = table[()] if arity == 0 else table[np.ix_(*([idx] * arity))]
        axes = [(f"h{k}", idx) for k in range(1, arity + 1)]
        found = _escape(vals, mask, axes, budget)
        if found:
            return _miss(cond, f"subalgebra-op:{sym}", found)
    return None


def _first(*checks):
    for check in checks:
        failure = check()
        if failure is not None:
            return failure
    return None


# ---------- image inclusions ----------

def _lifted(cond, d, images, mask, taus, budget):
    """alpha_i(tau(img(a1),...,img(ak)), tau(a1,...,ak)) inside H for every a."""
    owners, members = _image_pairs(images)
    for name, table in taus:
        k = table.ndim
        if k == 0:
            grid_u = grid_a = ()
        else:
            grid_u = np.ix_(*([members] * k))
            grid_a = np.ix_(*([owners] * k))
        vals, target = table[grid_u], table[grid_a]
        axes = [(f"p{j}", np.arange(len(owners))) for j in range(1, k + 1)]
        for i, alpha in enumerate(d.alphas, start=1):
            found = _escape(alpha[vals, target], mask, axes, budget)
            if found:
                assignment, value = found
                named = {"i": i}
                for j in range(1, k + 1):
                    p = assignment[f"p{j}"]
                    named[f"a{j}"] = int(owners[p])
                    named[f"u{j}"] = int(members[p])
                return FailureWitness(condition=cond, clause=f"lifted-op:{name}", assignment=named, value=value)
    return None


def _shift(cond, d, images, mask, budget):
    """alpha_i(img(a), img(a)) inside H for every a."""
    for a, img in enumerate(images):
        for i, alpha in enumerate(d.alphas, start=1):
            found = _escape(alpha[np.ix_(img, img)], mask, [("u1", img), ("u2", img)], budget)
            if found:
                return _miss(cond, "alpha-shift", found, i=i, a=a)
    return None


def _single_slot(cond, alg, d, images, mask, taus, budget):
    """alpha_i(tau(a1,..,img(aj),..,ak), tau(a1,...,ak)) inside H for every a, i, j."""
    owners, members = _image_pairs(images)
    carrier = alg.carrier
    for name, table in taus:
        k = table.ndim
        for j in range(k):
            arrs_a = [carrier] * k
            arrs_u = [carrier] * k
            arrs_a[j], arrs_u[j] = owners, members
            vals, target = table[np.ix_(*arrs_u)], table[np.ix_(*arrs_a)]
            axes = [(f"a{q + 1}", carrier if q != j else np.arange(len(owners))) for q in range(k)]
            for i, alpha in enumerate(d.alphas, start=1):
                found = _escape(alpha[vals, target], mask, axes, budget)
                if found:
                    assignment, value = found
                    p = assignment[f"a{j + 1}"]
                    assignment[f"a{j + 1}"] = int(owners[p])
                    assignment["u"] = int(members[p])
                    return FailureWitness(condition=cond, clause=f"single-slot:{name}",
                                          assignment={"i": i, "j": j + 1, **assignment}, value=value)
    return None


def _class_images(cond, alg, w, H, images):
    p = sim_relation(alg, w, H)
    for a in range(alg.size):
        if frozenset(p.block_of(a)) != frozenset(int(v) for v in images[a]):
            return FailureWitness(condition=cond, clause="class-image", assignment={"a": a})
    return None


# ---------- the seven conditions ----------

def _check_semiabelian(alg: FiniteAlgebra, w: BitWitness) -> None:
    zero_symbol = w.zero.symbol if isinstance(w.zero, App) else None
    if alg.sig.constants != (zero_symbol,):
        raise SignatureError(f"subalgebra refinement needs the zero to be the only constant of {alg.sig.name}")


def check_condition(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int], cond: str,
                    semiabelian: bool = False, budget: Optional[Budget] = None) -> Verdict:
    cond = cond[5:] if cond.startswith("cond-") else cond
    if cond not in CONDITIONS:
        raise ValueError(f"unknown condition {cond!r}; expected one of {', '.join(CONDITIONS)}")
    H = frozenset(int(a) for a in H)
    budget = _budget(budget)
    if semiabelian:
        _check_semiabelian(alg, w)
    name = f"cond-{cond}"
    if not H:
        return Verdict(False, FailureWitness(condition=name, clause="nonempty"))
    if cond == "i":
        if is_ideal_oracle(alg, derived_ops(alg, w).zero, H, budget):
            return Verdict(True)
        return Verdict(False, FailureWitness(condition=name, clause="oracle"))

    d = derived_ops(alg, w)
    idx = _index(H)
    mask = _membership(alg.size, H)
    images = _image_arrays(alg, w, H)
    sub = lambda: _subalgebra(name, alg, idx, mask, budget)
    zero = lambda: _zero_clause(name, d, mask, budget)
    theta = lambda: _theta_closure(name, d, idx, mask, budget)
    alpha = lambda: _alpha_closure(name, d, idx, mask, budget)
    alpha0 = lambda: _alpha_zero(name, d, idx, mask, budget)
    shift = lambda: _shift(name, d, images, mask, budget)
    own_ops = _tau_tables(alg, d)
    slot = lambda: _single_slot(name, alg, d, images, mask, own_ops, budget)

    if cond == "ii":
        head = (sub,) if semiabelian else (theta, alpha)
        failure = _first(*head, lambda: _lifted(name, d, images, mask, _tau_tables(alg, d, with_theta=True), budget))
    elif cond == "iii":
        head = (sub,) if semiabelian else (zero, theta, alpha0)
        taus = _tau_tables(alg, d, with_theta=True, with_alphas=True)
        failure = _first(*head, lambda: _lifted(name, d, images, mask, taus, budget))
    elif cond == "iv":
        head = (sub,) if semiabelian else (theta, alpha0)
        failure = _first(*head, lambda: _lifted(name, d, images, mask, own_ops, budget), shift)
    elif cond == "v":
        head = (sub,) if semiabelian else (theta, alpha0)
        failure = _first(*head, shift, slot)
    elif cond == "vi":
        failure = _first(zero, theta, alpha0, lambda: _class_images(name, alg, w, H, images), slot)
    else:
        failure = _kernel_condition(name, alg, w, H, d)
    return Verdict(failure is None, failure)


def _kernel_condition(name: str, alg: FiniteAlgebra, w: BitWitness, H: Subset, d: DerivedOps):
    p = sim_relation(alg, w, H)
    ok, bad = is_congruence(alg, p)
    if not ok:
        assignment = {f"l{k}": v for k, v in enumerate(bad.left, start=1)}
        assignment.update({f"r{k}": v for k, v in enumerate(bad.right, start=1)})
        return FailureWitness(condition=name, clause=f"congruence:{bad.symbol}", assignment=assignment)
    if kernel_of(p, d.zero) != H:
        return FailureWitness(condition=name, clause="kernel", value=d.zero)
    return None


# ---------- lemma-level helpers ----------

def closed_under_theta_alpha_zero(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int],
                                  budget: Optional[Budget] = None) -> bool:
    """0 in H, H closed under theta and every alpha_i(-, 0)."""
    H = frozenset(H)
    if not H:
        return False
    budget = _budget(budget)
    d = derived_ops(alg, w)
    idx, mask = _index(H), _membership(alg.size, H)
    return _first(lambda: _zero_clause("", d, mask, budget),
                  lambda: _theta_closure("", d, idx, mask, budget),
                  lambda: _alpha_zero("", d, idx, mask, budget)) is None


def theta_alpha_inclusion(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int],
                          budget: Optional[Budget] = None) -> bool:
    """alpha_i(img(a), img(a)) is inside H for every a and i; an empty H never qualifies."""
    H = frozenset(H)
    if not H:
        return False
    return _shift("", derived_ops(alg, w), _image_arrays(alg, w, H), _membership(alg.size, H), _budget(budget)) is None


def classes_are_images(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int]) -> bool:
    H = frozenset(H)
    return _class_images("", alg, w, H, _image_arrays(alg, w, H)) is None


def related_alphas_inside(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int]) -> bool:
    """a ~H b implies alpha_i(a, b) in H for every i."""
    H = frozenset(H)
    d = derived_ops(alg, w)
    mask = _membership(alg.size, H)
    for block in sim_relation(alg, w, H).blocks:
        b = np.array(block)
        if any(not mask[alpha[np.ix_(b, b)]].all() for alpha in d.alphas):
            return False
    return True


class KernelRelation(BaseModel):
    a: int
    b: int
    congruent: bool
    alphas_inside: bool
    a_in_image_of_b: bool
    b_in_image_of_a: bool

    @computed_field
    @property
    def consistent(self) -> bool:
        return len({self.congruent, self.alphas_inside, self.a_in_image_of_b, self.b_in_image_of_a}) == 1


def congruence_for_kernel(alg: FiniteAlgebra, zero: int, H: Iterable[int],
                          budget: Optional[Budget] = None) -> Optional[Partition]:
    H = frozenset(H)
    for c in all_congruences(alg, budget):
        if kernel_of(c, zero) == H:
            return c
    return None


def kernel_relation_check(alg: FiniteAlgebra, w: BitWitness, H: Iterable[int], a: int, b: int,
                          budget: Optional[Budget] = None) -> KernelRelation:
    """Four descriptions of a and b being related modulo the ideal H."""
    H = frozenset(H)
    d = derived_ops(alg, w)
    cong = congruence_for_kernel(alg, d.zero, H, budget)
    if cong is None:
        raise NotAnIdeal(f"{sorted(H)} is not an ideal of {alg.name}")
    images = theta_images(alg, w, H)
    return KernelRelation(
        a=a, b=b,
        congruent=cong.same(a, b),
        alphas_inside=all(int(alpha[a, b]) in H for alpha in d.alphas),
        a_in_image_of_b=a in images[b],
        b_in_image_of_a=b in images[a],
    )


def right_cancellable(alg: FiniteAlgebra, w: BitWitness, restrict_to: Optional[Iterable[int]] = None,
                      budget: Optional[Budget] = None) -> bool:
    """alpha_i(theta(a, b), theta(a', b)) does not depend on b.

    a and a' range over A^n, or over H^n when restrict_to gives H.
    """
    budget = _budget(budget)
    d = derived_ops(alg, w)
    m = alg.size
    theta = d.theta
    if restrict_to is not None:
        idx = _index(restrict_to)
        if len(idx) == 0:
            return True
        theta = theta[np.ix_(*([idx] * d.n))]
    rows = theta.reshape(-1, m)
    for alpha in d.alphas:
        vals = alpha[rows[:, None, :], rows[None, :, :]]
        budget.charge(vals.size)
        if not (vals == vals[..., :1]).all():
            return False
    return True


# ---------- term-set closure and the oracle ----------

def closed_under(alg: FiniteAlgebra, ts: TermSet, H: Iterable[int], budget: Optional[Budget] = None) -> Verdict:
    """Every term maps x-slots in A and y-slots in H back into H."""
    H = frozenset(int(a) for a in H)
    cond = f"termset-{ts.variant.value}" if ts.variant else ts.label
    if not H:
        return Verdict(False, FailureWitness(condition=cond, clause="nonempty"))
    budget = _budget(budget)
    mask = _membership(alg.size, H)
    hvals = _index(H)
    for t, prov in ts.items():
        vs = vars_of(t)
        domains = [(x(i), alg.carrier) for i in sorted(vs.xvars)] + [(y(i), hvals) for i in sorted(vs.yvars)]
        env, shape = assignment_grid(domains)
        vals = np.asarray(eval_grid(alg, t, env, shape, budget))
        if vals.ndim == 0:
            escaped = [] if mask[int(vals)] else [()]
        else:
            escaped = np.argwhere(~mask[vals])
        if len(escaped):
            point = tuple(escaped[0])
            failure = FailureWitness(condition=cond, clause=prov.describe(), term=print_term(t),
                                     assignment=grid_point(domains, point), value=int(vals[point]))
            return Verdict(False, failure)
    return Verdict(True)


def ideal_closure(alg: FiniteAlgebra, ts: TermSet, seed: Iterable[int], budget: Optional[Budget] = None) -> Subset:
    """Least subset containing seed and the zero that the term set cannot escape."""
    budget = _budget(budget)
    members = set(int(a) for a in seed)
    outside = sorted(a for a in members if not 0 <= a < alg.size)
    if outside:
        raise ValueError(f"elements {outside} are outside the carrier of {alg.name}")
    members.add(zero_element(alg, ts.witness))
    rounds = 0
    while True:
        rounds += 1
        hvals = _index(members)
        grown = set(members)
        for t in ts.terms:
            vs = vars_of(t)
            domains = [(x(i), alg.carrier) for i in sorted(vs.xvars)] + [(y(i), hvals) for i in sorted(vs.yvars)]
            env, shape = assignment_grid(domains)
            grown.update(int(v) for v in np.unique(eval_grid(alg, t, env, shape, budget)))
        if grown == members:
            logger.debug("closure on %s settled after %d rounds at %d elements", alg.name, rounds, len(members))
            return frozenset(members)
        members = grown


def is_ideal_oracle(alg: FiniteAlgebra, zero: int, H: Iterable[int], budget: Optional[Budget] = None) -> bool:
    return congruence_for_kernel(alg, zero, H, budget) is not None


def list_ideals(alg: FiniteAlgebra, zero: int, budget: Optional[Budget] = None) -> List[Subset]:
    """Kernels of all congruences, smallest first; two congruences sharing a kernel is an error."""
    seen: Dict[Subset, Partition] = {}
    for c in all_congruences(alg, budget):
        k = kernel_of(c, zero)
        if k in seen:
            raise OracleInconsistency(
                f"{alg.name}: congruences {seen[k].as_lists()} and {c.as_lists()} share the kernel {sorted(k)}"
            )
        seen[k] = c
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


# ---------- signature extensions ----------

class ExtensionCheck(BaseModel):
    direct: bool
    base_ideal: bool
    inclusion: bool

    @property
    def via_base(self) -> bool:
        return self.base_ideal and self.inclusion

    @property
    def agree(self) -> bool:
        return self.direct == self.via_base


@lru_cache(maxsize=64)
def _reduct(alg: FiniteAlgebra, sig) -> FiniteAlgebra:
    return reduct(alg, sig)


def extension_ideal_check(alg: FiniteAlgebra, base: VarietySpec, ext: VarietySpec, H: Iterable[int],
                          mode, budget: Optional[Budget] = None) -> ExtensionCheck:
    """Ideal in the extended variety versus ideal in the base plus an inclusion for the new operations."""
    mode = ExtensionMode(mode)
    if not ext.sig.includes(base.sig):
        raise SignatureError(f"{ext.sig.name} does not extend {base.sig.name}")
    H = frozenset(int(a) for a in H)
    budget = _budget(budget)
    w = ext.witness
    d = derived_ops(alg, w)
    direct = bool(H) and is_ideal_oracle(alg, d.zero, H, budget)
    base_ideal = bool(H) and is_ideal_oracle(_reduct(alg, base.sig), d.zero, H, budget)
    inclusion = False
    if H:
        images = _image_arrays(alg, w, H)
        mask = _membership(alg.size, H)
        new_ops = _tau_tables(alg, d, [s for s in ext.sig.symbols if s not in base.sig.symbols])
        if mode is ExtensionMode.A:
            inclusion = _lifted("extension", d, images, mask, new_ops, budget) is None
        else:
            inclusion = _single_slot("extension", alg, d, images, mask, new_ops, budget) is None
    return ExtensionCheck(direct=direct, base_ideal=base_ideal, inclusion=inclusion)


def extended_termset(base: VarietySpec, ext: VarietySpec, variant, mode, semiabelian: bool = False) -> TermSet:
    return extend_termset(gen_termset(base, variant, semiabelian), ext, mode)


# ---------- subset sweeps ----------

def subset_sweep(size: int, sample_size: Optional[int] = None, seed: Optional[int] = None) -> List[Subset]:
    """All nonempty subsets in bitmask order, or a seeded sample when there are more than sample_size."""
    sample_size = config.SAMPLE_SIZE if sample_size is None else sample_size
    seed = config.SEED if seed is None else seed
    total = 2 ** size - 1
    if total <= sample_size:
        return [frozenset(a for a in range(size) if mask >> a & 1) for mask in range(1, total + 1)]
    rng = np.random.default_rng(seed)
    picked: Dict[Subset, None] = {}
    while len(picked) < sample_size:
        bits = rng.integers(0, 2, size=size).astype(bool)
        if bits.any():
            picked.setdefault(frozenset(int(a) for a in np.flatnonzero(bits)), None)
    logger.debug("sampled %d of %d subsets of a %d-element carrier", sample_size, total, size)
    return list(picked)


# ---------- reports ----------

class IdealReport(BaseModel):
    algebra: str
    subset: List[int]
    verdicts: Dict[str, bool]
    agreement: bool
    failures: List[FailureWitness] = []
    elapsed_ms: Optional[float] = None


class ClosureReport(BaseModel):
    algebra: str
    seed: List[int]
    termset: str
    closure: List[int]


class CongruenceReport(BaseModel):
    algebra: str
    count: int
    congruences: List[List[List[int]]]
    kernels: List[List[int]]


class IdealList(BaseModel):
    algebra: str
    count: int
    ideals: List[List[int]]


def expand_methods(methods: Iterable[str]) -> List[str]:
    out: List[str] = []
    for m in methods:
        chosen = METHODS if m == "all" else (m,)
        for c in chosen:
            if c not in METHODS:
                raise ValueError(f"unknown method {c!r}; expected all or one of {', '.join(METHODS)}")
            if c not in out:
                out.append(c)
    return [m for m in METHODS if m in out]


def decide(alg: FiniteAlgebra, spec: VarietySpec, H: Subset, method: str, semiabelian: bool = False,
           budget: Optional[Budget] = None) -> Verdict:
    if method == "oracle":
        holds = bool(H) and is_ideal_oracle(alg, derived_ops(alg, spec.witness).zero, H, budget)
        return Verdict(holds, None if holds else FailureWitness(condition="oracle", clause="oracle"))
    if method.startswith("cond-"):
        return check_condition(alg, spec.witness, H, method, semiabelian, budget)
    ts = gen_termset(spec, method[len("termset-"):], semiabelian)
    return closed_under(alg, ts, H, budget)


def build_ideal_report(alg: FiniteAlgebra, spec: VarietySpec, H: Iterable[int], methods: Iterable[str] = ("all",),
                       semiabelian: bool = False, budget: Optional[Budget] = None,
                       timing: bool = False) -> IdealReport:
    H = frozenset(int(a) for a in H)
    outside = [a for a in H if not 0 <= a < alg.size]
    if outside:
        raise ValueError(f"elements {sorted(outside)} are outside the carrier of {alg.name}")
    budget = _budget(budget)
    started = time.perf_counter()
    verdicts: Dict[str, bool] = {}
    failures: List[FailureWitness] = []
    for method in expand_methods(methods):
        verdict = decide(alg, spec, H, method, semiabelian, budget)
        verdicts[method] = verdict.holds
        if verdict.failure is not None:
            failures.append(verdict.failure.model_copy(update={"condition": method}))
    agreement = len(set(verdicts.values())) <= 1
    if not agreement:
        logger.warning("verdicts disagree on %s for %s: %s", alg.name, sorted(H), verdicts)
    elapsed = round((time.perf_counter() - started) * 1000, 3) if timing else None
    return IdealReport(algebra=alg.name, subset=sorted(H), verdicts=verdicts, agreement=agreement,
                       failures=failures, elapsed_ms=elapsed)
