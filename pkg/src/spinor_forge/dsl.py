"""Expression language for metric components.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | COORD | FUNC '(' expr ')' | '(' expr ')'

Coordinates are ``x0``..``x3`` plus the aliases ``t, r, th, ph`` (or the
names a config file declares).  Functions: sin, cos, sqrt, exp, ln.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

DEFAULT_COORDINATES = ("t", "r", "th", "ph")
FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
    "exp": math.exp,
    "ln": math.log,
}


class ExpressionError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ParseError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class DomainError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# tree


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Coord(Expr):
    index: int


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    left: Expr
    right: Expr
    symbol = "?"


@dataclass(frozen=True)
class Add(BinOp):
    symbol = "+"


@dataclass(frozen=True)
class Sub(BinOp):
    symbol = "-"


@dataclass(frozen=True)
class Mul(BinOp):
    symbol = "*"


@dataclass(frozen=True)
class Div(BinOp):
    symbol = "/"


@dataclass(frozen=True)
class Pow(BinOp):
    symbol = "^"


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr


_BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div, "^": Pow}

# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(source)
    while pos < end:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ParseError(f"unexpected character {source[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, coordinates: Mapping[str, int]):
        self.source = source
        self.coordinates = coordinates
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, op: str):
        kind, text, offset = self.tok
        if kind != "op" or text != op:
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {op!r}, found {found}", offset)
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, text, offset = self.tok
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", offset)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            node = _BINARY[op](node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            node = _BINARY[op](node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.tok[0] == "op" and self.tok[1] == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != 1:
                    raise ArityError(f"{text} takes 1 argument, got {len(args)}", offset)
                return Call(text, args[0])
            if text in self.coordinates:
                if self.tok[0] == "op" and self.tok[1] == "(":
                    raise ArityError(f"{text} is a coordinate, not a function", offset)
                return Coord(self.coordinates[text])
            raise UnknownIdentifierError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", offset)


def coordinate_table(names: Sequence[str] = DEFAULT_COORDINATES) -> dict[str, int]:
    if len(names) != 4:
        raise ValueError("exactly four coordinate names are required")
    table = {f"x{k}": k for k in range(4)}
    for k, name in enumerate(names):
        if name in FUNCTIONS:
            raise ValueError(f"coordinate name {name!r} shadows a function")
        table[name] = k
    return table


_DEFAULT_TABLE = coordinate_table()


def parse(source: str, coordinates: Mapping[str, int] | None = None) -> Expr:
    return _Parser(source, coordinates or _DEFAULT_TABLE).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def to_source(e: Expr) -> str:
    """Canonical text form; ``parse(to_source(e)) == e`` for parsed trees."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Coord):
        return f"x{e.index}"
    if isinstance(e, Call):
        return f"{e.name}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        if _PREC.get(type(e.operand), 5) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        p = _PREC[type(e)]
        left, right = to_source(e.left), to_source(e.right)
        lp = _PREC.get(type(e.left), 5)
        rp = _PREC.get(type(e.right), 5)
        if isinstance(e, Pow):
            # base binds tighter than anything but an atom; exponent may be unary
            if lp <= p:
                left = f"({left})"
            if rp < 3:
                right = f"({right})"
        else:
            if lp < p:
                left = f"({left})"
            if rp <= p:
                right = f"({right})"
        return f"{left} {e.symbol} {right}"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation


def _power(base: float, exponent: float) -> float:
    if exponent.is_integer() and abs(exponent) <= 64:
        n = int(exponent)
        acc = 1.0
        for _ in range(abs(n)):
            acc *= base
        if n < 0:
            if acc == 0.0:
                raise DomainError("zero raised to a negative power")
            acc = 1.0 / acc
        return acc
    if base <= 0.0:
        raise DomainError(f"non-integer power of non-positive base {base}")
    return math.exp(exponent * math.log(base))


def _eval(e: Expr, x: Sequence[float]) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Coord):
        return x[e.index]
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, Call):
        v = _eval(e.arg, x)
        if e.name == "sqrt" and v < 0.0:
            raise DomainError(f"sqrt of negative value {v}")
        if e.name == "ln" and v <= 0.0:
            raise DomainError(f"ln of non-positive value {v}")
        try:
            return FUNCTIONS[e.name](v)
        except (OverflowError, ValueError) as exc:
            raise DomainError(f"{e.name}({v}): {exc}") from None
    a = _eval(e.left, x)
    b = _eval(e.right, x)
    if isinstance(e, Add):
        return a + b
    if isinstance(e, Sub):
        return a - b
    if isinstance(e, Mul):
        return a * b
    if isinstance(e, Div):
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b
    if isinstance(e, Pow):
        try:
            return _power(a, b)
        except OverflowError:
            raise DomainError(f"overflow in {a}^{b}") from None
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, point: Sequence[float]) -> float:
    """Evaluate at a 4-point; raises :class:`DomainError` outside the domain."""
    v = _eval(e, point)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value {v}")
    return v


# ---------------------------------------------------------------------------
# metric specifications


class SignatureViolation(ValueError):
    pass


def metric_signature(g: np.ndarray) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a symmetric matrix."""
    w = np.linalg.eigvalsh(g)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    pos = int(np.sum(w > 1e-12 * scale))
    neg = int(np.sum(w < -1e-12 * scale))
    return pos, neg


@dataclass(frozen=True)
class MetricSpec:
    name: str
    components: Mapping[tuple[int, int], Expr]
    domain: Expr | None = None
    coordinates: tuple[str, ...] = DEFAULT_COORDINATES

    def __post_init__(self):
        missing = [f"g{m}{n}" for m in range(4) for n in range(m, 4) if (m, n) not in self.components]
        if missing:
            raise ValueError(f"metric {self.name!r} missing components: {', '.join(missing)}")
        extra = [k for k in self.components if not (0 <= k[0] <= k[1] <= 3)]
        if extra:
            raise ValueError(f"metric {self.name!r} has non-canonical keys {extra}")

    def in_domain(self, x: Sequence[float]) -> bool:
        if self.domain is None:
            return True
        try:
            return evaluate(self.domain, x) > 0.0
        except DomainError:
            return False

    def metric(self, x: Sequence[float]) -> np.ndarray:
        g = np.empty((4, 4))
        for (m, n), e in self.components.items():
            g[m, n] = g[n, m] = evaluate(e, x)
        return g

    def check_signature(self, x: Sequence[float]) -> None:
        g = self.metric(x)
        if metric_signature(g) != (1, 3):
            raise SignatureViolation(
                f"metric {self.name!r} does not have signature (+,-,-,-) at {list(x)}"
            )
