"""Scalar-field expressions over chart coordinates ``x1 .. xd``.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' integer)?
    base   := number | 'x' integer | '(' expr ')' | func '(' expr ')'
    func   := sin | cos | exp | sqrt

Unary minus binds looser than ``^``, so ``-x1^2`` is ``-(x1^2)``.
Expressions evaluate to :class:`~bochnerlab.jet.Jet` values carrying exact
partial derivatives up to third order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .jet import MAX_ORDER, Jet

FUNCTIONS = ("sin", "cos", "exp", "sqrt")


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class VariableIndexError(ExprSyntaxError):
    pass


class DomainError(ValueError):
    """Evaluation left the domain of an operation (division by zero, sqrt of x <= 0)."""

    def __init__(self, message: str, subexpression: "Expression"):
        self.subexpression = subexpression
        super().__init__(f"{message} in subexpression {to_text(subexpression)}")


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Node:
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return self._key() == other._key()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=False)
class Const(_Node):
    value: Fraction

    def _key(self):
        return (self.value,)


@dataclass(frozen=True, eq=False)
class Var(_Node):
    index: int  # 1-based, as written

    def _key(self):
        return (self.index,)


@dataclass(frozen=True, eq=False)
class Neg(_Node):
    arg: "Expression"

    def _key(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class BinOp(_Node):
    op: str
    left: "Expression"
    right: "Expression"

    def _key(self):
        return (self.op, self.left, self.right)


@dataclass(frozen=True, eq=False)
class Pow(_Node):
    base: "Expression"
    exponent: int

    def _key(self):
        return (self.base, self.exponent)


@dataclass(frozen=True, eq=False)
class Func(_Node):
    name: str
    arg: "Expression"

    def _key(self):
        return (self.name, self.arg)


Expression = Union[Const, Var, Neg, BinOp, Pow, Func]


def _decimal(q: Fraction) -> str:
    num, den = q.numerator, q.denominator
    k = 0
    while (10 ** k) % den:
        k += 1
        if k > 64:
            raise ValueError(f"constant {q} has no finite decimal form")
    digits = str(abs(num) * (10 ** k // den))
    if k:
        digits = digits.rjust(k + 1, "0")
        digits = digits[:-k] + "." + digits[-k:]
    return ("-" if num < 0 else "") + digits


def to_text(e: Expression) -> str:
    """Fully parenthesized text that parses back to an identical AST."""
    if isinstance(e, Const):
        s = _decimal(abs(e.value))
        return s if e.value >= 0 else f"(-{s})"
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)})^{e.exponent}"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- parser ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if m is None or m.end() == pos:
                bad = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip())
                raise ExprSyntaxError(f"unexpected character {stripped[bad]!r}", bad, text)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", off, self.text)

    def parse(self) -> Expression:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off, self.text)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        b = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, val, off = self.take()
            if kind != "num" or not val.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", off, self.text)
            return Pow(b, sign * int(val))
        return b

    def base(self):
        kind, val, off = self.take()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            m = re.fullmatch(r"x(\d+)", val)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.dim:
                    raise VariableIndexError(
                        f"variable {val} outside chart dimension {self.dim}", off, self.text)
                return Var(idx)
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(val, arg)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", off, self.text)
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {what}", off, self.text)


def parse_expr(text: str, dim: int) -> Expression:
    """Parse ``text`` into an immutable AST over variables ``x1 .. x{dim}``."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text if isinstance(text, str) else "")
    if dim < 1:
        raise ValueError("dim must be positive")
    return _Parser(text, dim).parse()


def max_variable(e: Expression) -> int:
    """Largest variable index used in ``e`` (0 for constants)."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Const):
        return 0
    if isinstance(e, BinOp):
        return max(max_variable(e.left), max_variable(e.right))
    if isinstance(e, Pow):
        return max_variable(e.base)
    return max_variable(e.arg)


# -- evaluation ------------------------------------------------------------

def _unary(name: str, a: Jet, node: Func) -> Jet:
    t = float(a.value)
    if name == "sin":
        s, c = math.sin(t), math.cos(t)
        return a.compose(s, c, -s, -c)
    if name == "cos":
        s, c = math.sin(t), math.cos(t)
        return a.compose(c, -s, -c, s)
    if name == "exp":
        v = math.exp(t)
        return a.compose(v, v, v, v)
    if name == "sqrt":
        if t <= 0.0:
            raise DomainError(f"sqrt of non-positive value {t:g}", node)
        r = math.sqrt(t)
        return a.compose(r, 0.5 / r, -0.25 / r ** 3, 0.375 / r ** 5)
    raise UnknownIdentifierError(f"unknown function {name!r}", 0)


class _Evaluator:
    def __init__(self, point: Sequence[float], order: int):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in 0..{MAX_ORDER}")
        self.point = np.asarray(point, dtype=float)
        self.order = order
        self.memo: dict = {}

    def __call__(self, e: Expression) -> Jet:
        hit = self.memo.get(e)
        if hit is None:
            hit = self.memo[e] = self._eval(e)
        return hit

    def _eval(self, e: Expression) -> Jet:
        d = len(self.point)
        if isinstance(e, Const):
            return Jet.constant(float(e.value), d, self.order)
        if isinstance(e, Var):
            if e.index > d:
                raise VariableIndexError(f"x{e.index} used at a {d}-dimensional point", 0)
            return Jet.variable(e.index - 1, self.point, self.order)
        if isinstance(e, Neg):
            return -self(e.arg)
        if isinstance(e, BinOp):
            a, b = self(e.left), self(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if float(b.value) == 0.0:
                raise DomainError("division by zero", e)
            return a / b
        if isinstance(e, Pow):
            a = self(e.base)
            if e.exponent < 0 and float(a.value) == 0.0:
                raise DomainError("negative power of zero", e)
            return a ** e.exponent
        if isinstance(e, Func):
            return _unary(e.name, self(e.arg), e)
        raise TypeError(f"not an expression node: {e!r}")


def eval_jet(e: Expression, p: Sequence[float], order: int = MAX_ORDER) -> Jet:
    """Value and exact partials of ``e`` up to ``order`` at the point ``p``."""
    return _Evaluator(p, order)(e)


def eval_jets(exprs: Sequence[Expression], p: Sequence[float], order: int = MAX_ORDER) -> list[Jet]:
    """Evaluate several expressions at one point, sharing common subtrees."""
    ev = _Evaluator(p, order)
    return [ev(e) for e in exprs]


def eval_value(e: Expression, p: Sequence[float]) -> float:
    return float(eval_jet(e, p, 0).value)
