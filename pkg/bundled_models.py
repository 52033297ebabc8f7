# bundled_models.py
"""Finite models shipped with the builtin varieties.

Groups, rings and their operator extensions are built from the defining
construction (modular arithmetic, dihedral presentations, a twisted product),
and products of models are formed coordinatewise. The three smallest
loop-family tables below (LOOP5_MUL, SEMILOOP3_RIGHT, DIVISIBLE4_RIGHT) were
found by a search over small Cayley tables and are pinned as literals; their
division tables are still derived from the multiplication.
"""
import logging
from typing import Callable, Dict, List, Sequence

import numpy as np

from finite_algebra import FiniteAlgebra, load_algebra
from term_core import Signature

logger = logging.getLogger("bit_models")

# Smallest nonassociative loop shape: identity 0, every element an involution.
LOOP5_MUL = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]

# Right translations x -> x*y for a semi-loop with left identity 0: sigma_y(0) = y.
SEMILOOP3_RIGHT = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
]

DIVISIBLE4_RIGHT = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 1, 0],
    [3, 1, 2, 0],
]


def _table(size: int, arity: int, fn: Callable[..., int]) -> np.ndarray:
    grid = np.indices((size,) * arity).reshape(arity, -1).T
    return np.array([fn(*map(int, row)) for row in grid], dtype=np.int64)


def cyclic_group(n: int, sig: Signature, name: str = None) -> FiniteAlgebra:
    return load_algebra(sig, n, {
        "e": [0],
        "mul": _table(n, 2, lambda a, b: (a + b) % n),
        "inv": _table(n, 1, lambda a: (-a) % n),
    }, name or f"Z{n}")


def klein_group(sig: Signature) -> FiniteAlgebra:
    return load_algebra(sig, 4, {
        "e": [0],
        "mul": _table(4, 2, lambda a, b: a ^ b),
        "inv": list(range(4)),
    }, "V4")


def _dihedral_mul(n: int, a: int, b: int) -> int:
    # k < n encodes r^k, k >= n encodes s r^(k-n); r^k s = s r^-k
    sa, ra = divmod(a, n)
    sb, rb = divmod(b, n)
    if sb == 0:
        return sa * n + (ra + rb) % n
    return (1 - sa) * n + (rb - ra) % n


def _dihedral_inv(n: int, a: int) -> int:
    s, r = divmod(a, n)
    return a if s else (-r) % n


def dihedral_group(n: int, sig: Signature, name: str) -> FiniteAlgebra:
    size = 2 * n
    return load_algebra(sig, size, {
        "e": [0],
        "mul": _table(size, 2, lambda a, b: _dihedral_mul(n, a, b)),
        "inv": _table(size, 1, lambda a: _dihedral_inv(n, a)),
    }, name)


def cyclic_ring(n: int, sig: Signature, name: str = None) -> FiniteAlgebra:
    tables = {
        "zero": [0],
        "add": _table(n, 2, lambda a, b: (a + b) % n),
        "neg": _table(n, 1, lambda a: (-a) % n),
        "mul": _table(n, 2, lambda a, b: (a * b) % n),
    }
    return load_algebra(sig, n, {s: tables[s] for s in sig.symbols}, name or f"Z{n}")


def _right_division(mul: np.ndarray) -> np.ndarray:
    """x/y: the unique z with z*y = x; every column of mul must be a permutation."""
    size = mul.shape[0]
    rdiv = np.empty_like(mul)
    for b in range(size):
        rdiv[mul[:, b], b] = np.arange(size)
    return rdiv


def _left_division(mul: np.ndarray) -> np.ndarray:
    """y\\x: the unique z with y*z = x; every row of mul must be a permutation."""
    size = mul.shape[0]
    ldiv = np.empty_like(mul)
    for a in range(size):
        ldiv[a, mul[a, :]] = np.arange(size)
    return ldiv


def loop_from_cayley(mul: Sequence[Sequence[int]], sig: Signature, name: str,
                     extra: Dict[str, np.ndarray] = None) -> FiniteAlgebra:
    mul = np.asarray(mul, dtype=np.int64)
    tables = {"e": [0], "mul": mul, "rdiv": _right_division(mul), "ldiv": _left_division(mul)}
    tables.update(extra or {})
    return load_algebra(sig, mul.shape[0], {s: tables[s] for s in sig.symbols}, name)


def semiloop_from_right_translations(right: Sequence[Sequence[int]], sig: Signature, name: str) -> FiniteAlgebra:
    """right[b] lists x*b for x in the carrier; right[b][0] == b makes 0 a left identity."""
    mul = np.asarray(right, dtype=np.int64).T
    return load_algebra(sig, mul.shape[0], {"e": [0], "mul": mul, "rdiv": _right_division(mul)}, name)


def _twisted_mul(a: int, b: int) -> int:
    # k = 2u + s over Z3 x Z2; the Z2 part gains a carry when u = v = 1
    (u, s), (v, t) = divmod(a, 2), divmod(b, 2)
    carry = 1 if u == v == 1 else 0
    return 2 * ((u + v) % 3) + (s + t + carry) % 2


def twisted_loop(sig: Signature, extra: Dict[str, np.ndarray] = None, name: str = "L6") -> FiniteAlgebra:
    """Nonassociative loop of order 6 with central subloop {0, 1} and quotient Z3."""
    return loop_from_cayley(_table(6, 2, _twisted_mul).reshape(6, 6), sig, name, extra)


def direct_product(left: FiniteAlgebra, right: FiniteAlgebra, sig: Signature, name: str) -> FiniteAlgebra:
    """Coordinatewise product; the pair (a, b) is element a * |right| + b."""
    m = right.size
    tables = {}
    for sym, arity in sig.ops:
        A, B = left.tables[sym], right.tables[sym]
        if arity == 0:
            tables[sym] = [int(A) * m + int(B)]
            continue
        tables[sym] = _table(left.size * m, arity, lambda *args: int(A[tuple(a // m for a in args)]) * m
                             + int(B[tuple(a % m for a in args)]))
    logger.debug("built %s = %s x %s", name, left.name, right.name)
    return load_algebra(sig, left.size * m, tables, name)


def two_element(sig: Signature) -> FiniteAlgebra:
    """Z2 with every binary operation taken as addition mod 2."""
    return load_algebra(sig, 2, {s: [0] if arity == 0 else _table(2, arity, lambda *args: sum(args) % 2)
                                 for s, arity in sig.ops}, "Z2")


# ---------- per-variety model lists ----------

def group_models(sig: Signature) -> List[FiniteAlgebra]:
    return [cyclic_group(4, sig), klein_group(sig), dihedral_group(3, sig, "S3"), dihedral_group(4, sig, "D4")]


def ring_models(sig: Signature) -> List[FiniteAlgebra]:
    return [cyclic_ring(4, sig), cyclic_ring(6, sig)]


def loop_models(sig: Signature) -> List[FiniteAlgebra]:
    return [loop_from_cayley(LOOP5_MUL, sig, "L5"), twisted_loop(sig)]


def semiloop_models(sig: Signature) -> List[FiniteAlgebra]:
    sl3 = semiloop_from_right_translations(SEMILOOP3_RIGHT, sig, "SL3")
    return [sl3, direct_product(sl3, two_element(sig), sig, "SL3xZ2")]


def divisible_groupoid_models(sig: Signature) -> List[FiniteAlgebra]:
    return [semiloop_from_right_translations(DIVISIBLE4_RIGHT, sig, "DG4")]


def omega_group_models(sig: Signature) -> List[FiniteAlgebra]:
    z4 = cyclic_group(4, _base(sig, "group"), "Z4")
    s3 = dihedral_group(3, _base(sig, "group"), "S3")
    even = {0, 1, 2}
    return [
        with_operation(z4, sig, "omega", _table(4, 2, lambda a, b: (a * b) % 4), "Z4w"),
        with_operation(s3, sig, "omega",
                       _table(6, 2, lambda a, b: a if b in even else _dihedral_inv(3, a)), "S3w"),
    ]


def omega_loop_models(sig: Signature) -> List[FiniteAlgebra]:
    base = loop_from_cayley(LOOP5_MUL, _base(sig, "loop"), "L5")
    # on L6 omega only reads the Z3 coordinate, so it respects the central subloop
    twisted = twisted_loop(sig, {"omega": _table(6, 2, lambda a, b: 2 * ((a // 2) * (b // 2) % 3))}, "L6w")
    return [with_operation(base, sig, "omega", _table(5, 2, lambda a, b: 0 if a == b else a), "L5w"), twisted]


def _base(sig: Signature, name: str) -> Signature:
    return Signature(name, tuple(op for op in sig.ops if op[0] != "omega"))


def with_operation(alg: FiniteAlgebra, sig: Signature, symbol: str, table, name: str) -> FiniteAlgebra:
    tables = {s: alg.tables[s] for s in alg.sig.symbols}
    tables[symbol] = table
    return load_algebra(sig, alg.size, tables, name)


def trivial_model(sig: Signature) -> FiniteAlgebra:
    arities = dict(sig.ops)
    return load_algebra(sig, 1, {s: [0] for s in arities}, "T1")
