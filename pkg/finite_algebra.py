# finite_algebra.py
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

import config
from errors import AlgebraFormatError, Budget, SignatureError, UnboundVariable
from term_core import Signature, Term, Var, parse_var, vars_of, vars_of_all

logger = logging.getLogger("bit_algebra")

Subset = FrozenSet[int]


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """Carrier {0..size-1} with one read-only numpy table per signature symbol.

    A table for a k-ary symbol has shape (size,)*k, so tables[f][a1,...,ak] is
    f(a1,...,ak); constants are 0-d arrays.
    """

    name: str
    sig: Signature
    size: int
    tables: Mapping[str, np.ndarray]

    @property
    def carrier(self) -> np.ndarray:
        return np.arange(self.size)

    def op(self, symbol: str, *args: int) -> int:
        return int(self.tables[symbol][tuple(args)])

    def flat_table(self, symbol: str) -> List[int]:
        return [int(v) for v in self.tables[symbol].reshape(-1)]

    def __repr__(self):
        return f"FiniteAlgebra(name={self.name!r}, sig={self.sig.name!r}, size={self.size})"


def load_algebra(sig: Signature, size: int, tables: Mapping[str, Union[Sequence[int], np.ndarray]],
                 name: str = "A") -> FiniteAlgebra:
    if size < 1:
        raise AlgebraFormatError(f"algebra {name}: size must be at least 1, got {size}")
    unknown = [s for s in tables if sig.arity(s) is None]
    if unknown:
        raise AlgebraFormatError(f"algebra {name}: tables for unknown symbols {', '.join(unknown)}")
    out: Dict[str, np.ndarray] = {}
    for sym, arity in sig.ops:
        if sym not in tables:
            raise AlgebraFormatError(f"algebra {name}: missing table for {sym!r}")
        flat = np.asarray(tables[sym], dtype=np.int64).reshape(-1)
        want = size ** arity
        if flat.size != want:
            raise AlgebraFormatError(
                f"algebra {name}: table {sym!r} has {flat.size} entries, expected {want}"
            )
        if flat.size and (flat.min() < 0 or flat.max() >= size):
            bad = int(flat[(flat < 0) | (flat >= size)][0])
            raise AlgebraFormatError(f"algebra {name}: table {sym!r} entry {bad} out of range 0..{size - 1}")
        arr = flat.reshape((size,) * arity)
        arr.setflags(write=False)
        out[sym] = arr
    return FiniteAlgebra(name, sig, size, out)


def reduct(alg: FiniteAlgebra, sig: Signature, name: Optional[str] = None) -> FiniteAlgebra:
    """Forget every operation not in sig."""
    if not alg.sig.includes(sig):
        raise SignatureError(f"{sig.name} is not a subsignature of {alg.sig.name}")
    return FiniteAlgebra(name or alg.name, sig, alg.size, {s: alg.tables[s] for s in sig.symbols})


# ---------- term evaluation ----------

def _eval(alg: FiniteAlgebra, t: Term, env: Mapping[Var, object]):
    if isinstance(t, Var):
        try:
            return env[t]
        except KeyError:
            raise UnboundVariable(str(t)) from None
    table = alg.tables.get(t.symbol)
    if table is None:
        raise SignatureError(f"unknown symbol {t.symbol!r} for algebra {alg.name}")
    if not t.children:
        return table[()]
    return table[tuple(_eval(alg, c, env) for c in t.children)]


def _normalize_assign(assign: Mapping) -> Dict[Var, int]:
    return {(k if isinstance(k, Var) else parse_var(k)): int(v) for k, v in assign.items()}


def eval_term(alg: FiniteAlgebra, t: Term, assign: Optional[Mapping] = None) -> int:
    return int(_eval(alg, t, _normalize_assign(assign or {})))


def assignment_grid(domains: Sequence[Tuple[Var, np.ndarray]]) -> Tuple[Dict[Var, np.ndarray], Tuple[int, ...]]:
    """One axis per variable, in the given order; rows are enumerated lexicographically."""
    shape = tuple(len(d) for _, d in domains)
    if not domains:
        return {}, shape
    mesh = np.meshgrid(*[np.asarray(d) for _, d in domains], indexing="ij")
    return {v: g for (v, _), g in zip(domains, mesh)}, shape


def eval_grid(alg: FiniteAlgebra, t: Term, env: Mapping[Var, np.ndarray], shape: Tuple[int, ...],
              budget: Optional[Budget] = None) -> np.ndarray:
    if budget is not None:
        budget.charge(int(np.prod(shape, dtype=np.int64)) if shape else 1)
    return np.broadcast_to(np.asarray(_eval(alg, t, env)), shape)


def grid_point(domains: Sequence[Tuple[Var, np.ndarray]], index: Sequence[int]) -> Dict[str, int]:
    return {str(v): int(d[i]) for (v, d), i in zip(domains, index)}


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    counter: Optional[Dict[str, int]] = None


def holds_identity(alg: FiniteAlgebra, lhs: Term, rhs: Term, budget: Optional[Budget] = None) -> IdentityCheck:
    budget = budget if budget is not None else Budget(config.BUDGET)
    domains = [(v, alg.carrier) for v in vars_of_all([lhs, rhs]).ordered()]
    env, shape = assignment_grid(domains)
    left = eval_grid(alg, lhs, env, shape, budget)
    right = eval_grid(alg, rhs, env, shape, budget)
    bad = np.argwhere(left != right)
    if len(bad) == 0:
        return IdentityCheck(True)
    return IdentityCheck(False, grid_point(domains, bad[0]))


def is_zero_ideal_term(alg: FiniteAlgebra, zero: int, t: Term, budget: Optional[Budget] = None) -> bool:
    budget = budget if budget is not None else Budget(config.BUDGET)
    vs = vars_of(t)
    domains = [(Var("x", i), alg.carrier) for i in sorted(vs.xvars)]
    env, shape = assignment_grid(domains)
    for i in vs.yvars:
        env[Var("y", i)] = zero
    values = eval_grid(alg, t, env, shape, budget)
    return bool(np.all(values == zero))


def subuniverse(alg: FiniteAlgebra, seed: Iterable[int]) -> Subset:
    members = set(int(a) for a in seed)
    while True:
        idx = np.array(sorted(members), dtype=np.int64)
        grown = set(members)
        for sym, arity in alg.sig.ops:
            table = alg.tables[sym]
            if arity == 0:
                grown.add(int(table[()]))
            elif len(idx):
                grown.update(int(v) for v in np.unique(table[np.ix_(*([idx] * arity))]))
        if grown == members:
            return frozenset(members)
        members = grown


# ---------- partitions and congruences ----------

class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self.rank[a] < self.rank[b]:
            a, b = b, a
        self.parent[b] = a
        if self.rank[a] == self.rank[b]:
            self.rank[a] += 1
        return True

    def partition(self) -> "Partition":
        return Partition.from_labels([self.find(i) for i in range(len(self.parent))])


@dataclass(frozen=True)
class Partition:
    """Blocks sorted internally and ordered by least element."""

    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(int(a) for a in b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        object.__setattr__(self, "blocks", blocks)
        flat = [a for b in blocks for a in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("partition blocks must be disjoint and cover 0..m-1")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: Dict[int, List[int]] = {}
        for a, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(a)
        return cls(tuple(tuple(g) for g in groups.values()))

    @classmethod
    def discrete(cls, size: int) -> "Partition":
        return cls(tuple((a,) for a in range(size)))

    @classmethod
    def total(cls, size: int) -> "Partition":
        return cls((tuple(range(size)),))

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    def labels(self) -> np.ndarray:
        lab = np.empty(self.size, dtype=np.int64)
        for k, b in enumerate(self.blocks):
            lab[list(b)] = k
        return lab

    def block_of(self, a: int) -> Tuple[int, ...]:
        for b in self.blocks:
            if a in b:
                return b
        raise ValueError(f"{a} is not in the carrier")

    def same(self, a: int, b: int) -> bool:
        return b in self.block_of(a)

    def join(self, other: "Partition") -> "Partition":
        uf = UnionFind(self.size)
        for b in self.blocks + other.blocks:
            for a in b[1:]:
                uf.union(b[0], a)
        return uf.partition()

    def refines(self, other: "Partition") -> bool:
        lab = other.labels()
        return all(len(set(lab[list(b)].tolist())) == 1 for b in self.blocks)

    def as_lists(self) -> List[List[int]]:
        return [list(b) for b in self.blocks]


def _rows(table: np.ndarray, j: int, size: int) -> np.ndarray:
    """Table with argument position j moved to the front, other positions flattened."""
    return np.moveaxis(table, j, 0).reshape(size, -1)


def _other_args(arity: int, j: int, column: int, size: int) -> List[int]:
    rest = list(np.unravel_index(column, (size,) * (arity - 1))) if arity > 1 else []
    return [int(v) for v in rest]


@dataclass(frozen=True)
class CompatibilityFailure:
    symbol: str
    left: Tuple[int, ...]
    right: Tuple[int, ...]


def compatibility_failure(alg: FiniteAlgebra, p: Partition) -> Optional[CompatibilityFailure]:
    """First operation instance that maps congruent arguments to incongruent values."""
    lab = p.labels()
    for sym, arity in alg.sig.ops:
        for j in range(arity):
            rows = _rows(alg.tables[sym], j, alg.size)
            for block in p.blocks:
                rep = block[0]
                for u in block[1:]:
                    bad = np.flatnonzero(lab[rows[u]] != lab[rows[rep]])
                    if len(bad):
                        rest = _other_args(arity, j, int(bad[0]), alg.size)
                        left = tuple(rest[:j] + [rep] + rest[j:])
                        right = tuple(rest[:j] + [u] + rest[j:])
                        return CompatibilityFailure(sym, left, right)
    return None


def _close(alg: FiniteAlgebra, uf: UnionFind, budget: Budget) -> None:
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for sym, arity in alg.sig.ops:
            for j in range(arity):
                rows = _rows(alg.tables[sym], j, alg.size)
                for u in range(alg.size):
                    r = uf.find(u)
                    if r == u:
                        continue
                    budget.charge(2 * rows.shape[1])
                    for p, q in zip(rows[u].tolist(), rows[r].tolist()):
                        if uf.union(p, q):
                            changed = True
    logger.debug("congruence closure on %s settled after %d rounds", alg.name, rounds)


def principal_congruence(alg: FiniteAlgebra, a: int, b: int, budget: Optional[Budget] = None) -> Partition:
    budget = budget if budget is not None else Budget(config.BUDGET)
    uf = UnionFind(alg.size)
    uf.union(a, b)
    _close(alg, uf, budget)
    return uf.partition()


def _lattice_order(p: Partition):
    return (-len(p.blocks), p.blocks)


# algebra -> (lattice, evaluations spent enumerating it)
_LATTICES: Dict[FiniteAlgebra, Tuple[Tuple[Partition, ...], int]] = {}
_LATTICE_CACHE_SIZE = 64


def _enumerate_congruences(alg: FiniteAlgebra, budget: Budget) -> Tuple[Partition, ...]:
    principals = []
    for a in range(alg.size):
        for b in range(a + 1, alg.size):
            p = principal_congruence(alg, a, b, budget)
            if p not in principals:
                principals.append(p)
    found = {Partition.discrete(alg.size)} | set(principals)
    frontier = list(found)
    while frontier:
        fresh = []
        for p in frontier:
            for q in principals:
                j = p.join(q)
                if j not in found:
                    found.add(j)
                    fresh.append(j)
        frontier = fresh
    lattice = tuple(sorted(found, key=_lattice_order))
    logger.info("enumerated %d congruences of %s (%d principal)", len(lattice), alg.name, len(principals))
    return lattice


def all_congruences(alg: FiniteAlgebra, budget: Optional[Budget] = None) -> List[Partition]:
    """The congruence lattice, finest first.

    The enumeration runs under the caller's budget and is cached per algebra;
    a cached lattice charges its recorded cost again on every call.
    """
    budget = budget if budget is not None else Budget(config.BUDGET)
    cached = _LATTICES.get(alg)
    if cached is not None:
        lattice, cost = cached
        budget.charge(cost)
        return list(lattice)
    start = budget.used
    lattice = _enumerate_congruences(alg, budget)
    if len(_LATTICES) >= _LATTICE_CACHE_SIZE:
        _LATTICES.pop(next(iter(_LATTICES)))
    _LATTICES[alg] = (lattice, budget.used - start)
    return list(lattice)


def kernel_of(p: Partition, zero: int) -> Subset:
    return frozenset(p.block_of(zero))


# ---------- .alg files ----------

def parse_algebra(text: str, sig: Signature) -> FiniteAlgebra:
    tokens: List[str] = []
    for line in text.splitlines():
        tokens.extend(line.split("#", 1)[0].replace(":", " : ").split())
    pos = 0

    def take(expected: Optional[str] = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise AlgebraFormatError(f"unexpected end of algebra file, expected {expected or 'a value'}")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise AlgebraFormatError(f"expected {expected!r}, got {tok!r}")
        pos += 1
        return tok

    def take_int(what: str) -> int:
        tok = take()
        try:
            return int(tok)
        except ValueError:
            raise AlgebraFormatError(f"expected integer for {what}, got {tok!r}") from None

    take("algebra")
    name = take()
    take(":")
    sig_name = take()
    if sig_name != sig.name:
        raise AlgebraFormatError(f"algebra {name} is declared over {sig_name!r}, not {sig.name!r}")
    take("size")
    size = take_int("size")
    if size < 1:
        raise AlgebraFormatError(f"algebra {name}: size must be at least 1, got {size}")
    tables: Dict[str, List[int]] = {}
    while pos < len(tokens):
        take("table")
        sym = take()
        arity = sig.arity(sym)
        if arity is None:
            raise AlgebraFormatError(f"algebra {name}: table for unknown symbol {sym!r}")
        if sym in tables:
            raise AlgebraFormatError(f"algebra {name}: duplicate table for {sym!r}")
        tables[sym] = [take_int(f"table {sym}") for _ in range(size ** arity)]
    return load_algebra(sig, size, tables, name)


def load_algebra_file(path: str, sig: Signature) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as fh:
        alg = parse_algebra(fh.read(), sig)
    logger.info("loaded algebra %s (size %d) from %s", alg.name, alg.size, path)
    return alg


def dump_algebra(alg: FiniteAlgebra) -> str:
    lines = [f"algebra {alg.name} : {alg.sig.name}", f"size {alg.size}"]
    for sym, arity in alg.sig.ops:
        lines.append(f"table {sym}")
        flat = alg.flat_table(sym)
        if arity <= 1:
            lines.append(" ".join(map(str, flat)))
        else:
            for k in range(0, len(flat), alg.size):
                lines.append(" ".join(map(str, flat[k:k + alg.size])))
    return "\n".join(lines) + "\n"


def subset_label(H: Iterable[int]) -> str:
    return ",".join(str(a) for a in sorted(H))
