# term_core.py
import re
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from errors import SignatureError, TermSyntaxError

logger = logging.getLogger("bit_terms")

X = "x"
Y = "y"

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
VAR_RE = re.compile(r"([xy])([1-9][0-9]*)\Z")
TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([(),])|(\S))")


@dataclass(frozen=True)
class Var:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in (X, Y):
            raise ValueError(f"variable kind must be 'x' or 'y', got {self.kind!r}")
        if self.index < 1:
            raise ValueError(f"variable index must be positive, got {self.index}")

    def __str__(self):
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class App:
    symbol: str
    children: Tuple["Term", ...] = ()

    def __str__(self):
        return print_term(self)


Term = Union[Var, App]


def x(i: int) -> Var:
    return Var(X, i)


def y(i: int) -> Var:
    return Var(Y, i)


def app(symbol: str, *children: Term) -> App:
    return App(symbol, tuple(children))


@dataclass(frozen=True)
class Signature:
    name: str
    ops: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple((str(s), int(a)) for s, a in self.ops))
        seen = set()
        for sym, arity in self.ops:
            if not IDENT_RE.match(sym):
                raise SignatureError(f"invalid operation symbol {sym!r}")
            if VAR_RE.match(sym):
                raise SignatureError(f"operation symbol {sym!r} collides with variable syntax")
            if sym in seen:
                raise SignatureError(f"duplicate operation symbol {sym!r}")
            if arity < 0:
                raise SignatureError(f"negative arity for {sym!r}")
            seen.add(sym)

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(s for s, _ in self.ops)

    @property
    def constants(self) -> Tuple[str, ...]:
        return tuple(s for s, a in self.ops if a == 0)

    def arity(self, symbol: str) -> Optional[int]:
        for s, a in self.ops:
            if s == symbol:
                return a
        return None

    def extend(self, extra: Iterable[Tuple[str, int]], name: Optional[str] = None) -> "Signature":
        extra = tuple(extra)
        clash = [s for s, _ in extra if s in self.symbols]
        if clash:
            raise SignatureError(f"symbol clash on {', '.join(clash)}")
        return Signature(name or self.name, self.ops + extra)

    def includes(self, other: "Signature") -> bool:
        mine = dict(self.ops)
        return all(mine.get(s) == a for s, a in other.ops)


@dataclass(frozen=True)
class VarSet:
    xvars: FrozenSet[int] = field(default_factory=frozenset)
    yvars: FrozenSet[int] = field(default_factory=frozenset)

    def ordered(self) -> List[Var]:
        """x-variables then y-variables, each by ascending index."""
        return [x(i) for i in sorted(self.xvars)] + [y(i) for i in sorted(self.yvars)]

    def __len__(self):
        return len(self.xvars) + len(self.yvars)


# ---------- grammar ----------

def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = TOKEN_RE.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("ident", m.group(1), start))
        elif m.group(2):
            tokens.append((m.group(2), m.group(2), start))
        else:
            raise TermSyntaxError(f"unexpected character {m.group(3)!r}", start)
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Optional[Signature]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise TermSyntaxError(f"expected {want}, got {got}", tok[2])
        self.pos += 1
        return tok

    def term(self) -> Term:
        _, name, start = self.take("ident")
        var = VAR_RE.match(name)
        if var:
            if self.peek()[0] == "(":
                raise TermSyntaxError(f"variable {name} cannot take arguments", self.peek()[2])
            return Var(var.group(1), int(var.group(2)))
        children: List[Term] = []
        if self.peek()[0] == "(":
            self.take("(")
            if self.peek()[0] == ")":
                self.take(")")
            else:
                children.append(self.term())
                while self.peek()[0] == ",":
                    self.take(",")
                    children.append(self.term())
                self.take(")")
        if self.sig is not None:
            arity = self.sig.arity(name)
            if arity is None:
                raise SignatureError(f"unknown symbol {name!r} at position {start}")
            if arity != len(children):
                raise SignatureError(
                    f"arity mismatch for {name!r} at position {start}: expected {arity}, got {len(children)}"
                )
        return App(name, tuple(children))


def parse_term(text: str, sig: Optional[Signature] = None) -> Term:
    parser = _Parser(text, sig)
    t = parser.term()
    tok = parser.peek()
    if tok[0] != "end":
        raise TermSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return t


def parse_var(text: str) -> Var:
    m = VAR_RE.match(text.strip())
    if not m:
        raise TermSyntaxError(f"not a variable: {text!r}", 0)
    return Var(m.group(1), int(m.group(2)))


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return str(t)
    if not t.children:
        return t.symbol
    return f"{t.symbol}({','.join(print_term(c) for c in t.children)})"


def validate_term(sig: Signature, t: Term) -> List[str]:
    """Every violation found in t; an empty list means the term is well formed."""
    violations: List[str] = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            continue
        arity = sig.arity(node.symbol)
        if arity is None:
            violations.append(f"unknown symbol {node.symbol!r}")
        elif arity != len(node.children):
            violations.append(
                f"arity violation: {node.symbol!r} expects {arity} arguments, got {len(node.children)}"
            )
        stack.extend(reversed(node.children))
    return violations


def substitute(t: Term, binding: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return binding.get(t, t)
    if not t.children:
        return t
    return App(t.symbol, tuple(substitute(c, binding) for c in t.children))


def vars_of(t: Term) -> VarSet:
    xs, ys = set(), set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            (xs if node.kind == X else ys).add(node.index)
        else:
            stack.extend(node.children)
    return VarSet(frozenset(xs), frozenset(ys))


def vars_of_all(terms: Iterable[Term]) -> VarSet:
    xs, ys = set(), set()
    for t in terms:
        vs = vars_of(t)
        xs |= vs.xvars
        ys |= vs.yvars
    return VarSet(frozenset(xs), frozenset(ys))


def is_ground(t: Term) -> bool:
    return len(vars_of(t)) == 0


def instantiate(t: Term, args: Sequence[Term]) -> Term:
    """Plug args into x1..xk of t; used to apply witness terms as derived operations."""
    return substitute(t, {x(i + 1): a for i, a in enumerate(args)})


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.children:
        return 0
    return 1 + max(term_depth(c) for c in t.children)
