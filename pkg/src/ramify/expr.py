"""Right-hand-side expressions for tower specifications.

Grammar (precedence high to low: ``^``, unary minus, ``*``, binary ``+ -``)::

    sum     := product (('+' | '-') product)*
    product := unary ('*' unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-' | '+'] INT)?
    atom    := INT | 't' | 'w' | 'g' INT | '(' sum ')'

Exponents are integer literals only.  Errors report byte offsets into the
source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .errors import ExprSyntaxError, UnknownSymbol


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    """``t`` (index 0), ``w`` (index -1) or generator ``g<index>``."""

    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


Expr = Num | Sym | Neg | BinOp | Pow

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = len(text) - len(text[pos:].lstrip())
            if stripped == len(text):
                break
            raise ExprSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, max_generator: int | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.max_generator = max_generator

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def sum(self):
        node = self.product()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = BinOp(val, node, self.product())
            else:
                return node

    def product(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                node = BinOp("*", node, self.unary())
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            kind, val, pos = self.take()
            if kind != "int":
                raise ExprSyntaxError(f"exponent must be an integer literal, found {val or 'end of input'!r}", pos)
            base = Pow(base, sign * int(val))
            kind, val, pos = self.peek()
            if kind == "op" and val == "^":
                raise ExprSyntaxError("chained exponents are not allowed", pos)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return Num(int(val))
        if kind == "name":
            if val == "t":
                return Sym("t", 0)
            if val == "w":
                return Sym("w", -1)
            m = re.fullmatch(r"g([1-9]\d*)", val)
            if m:
                k = int(m.group(1))
                if self.max_generator is not None and k > self.max_generator:
                    raise UnknownSymbol(f"generator {val} at offset {pos} is not built yet")
                return Sym(val, k)
            raise UnknownSymbol(f"unknown symbol {val!r} at offset {pos}")
        if kind == "op" and val == "(":
            node = self.sum()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse_expr(text: str, max_generator: int | None = None) -> Expr:
    """Parse ``text``; generators beyond ``max_generator`` raise UnknownSymbol."""
    return _Parser(text, max_generator).parse()


def symbols(e: Expr) -> set[int]:
    """Generator indices referenced by ``e`` (0 for t)."""
    if isinstance(e, Sym):
        return {e.index} if e.index >= 0 else set()
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return symbols(e.arg)
    if isinstance(e, Pow):
        return symbols(e.base)
    return symbols(e.left) | symbols(e.right)


def evaluate(e: Expr, lookup: Callable[[Sym], object], constant: Callable[[int], object]):
    """Fold ``e`` with ``lookup`` for symbols and ``constant`` for literals.

    Values only need ``+ - * ** neg``; scalars and series mix freely.
    """
    if isinstance(e, Num):
        return constant(e.value)
    if isinstance(e, Sym):
        return lookup(e)
    if isinstance(e, Neg):
        return -evaluate(e.arg, lookup, constant)
    if isinstance(e, Pow):
        return evaluate(e.base, lookup, constant) ** e.exp
    left = evaluate(e.left, lookup, constant)
    right = evaluate(e.right, lookup, constant)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    return left * right


def rename(e: Expr, mapping: Callable[[Sym], Expr]) -> Expr:
    """Replace every symbol by ``mapping(sym)``."""
    if isinstance(e, Sym):
        return mapping(e)
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(rename(e.arg, mapping))
    if isinstance(e, Pow):
        return Pow(rename(e.base, mapping), e.exp)
    return BinOp(e.op, rename(e.left, mapping), rename(e.right, mapping))


_PREC = {"+": 1, "-": 1, "*": 2}


def to_text(e: Expr, _ctx: int = 0) -> str:
    """Source text for ``e`` with only the parentheses the grammar needs."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Neg):
        out = "-" + to_text(e.arg, 3)
        return f"({out})" if _ctx > 3 else out
    if isinstance(e, Pow):
        out = f"{to_text(e.base, 5)}^{e.exp}"
        return f"({out})" if _ctx > 4 else out
    prec = _PREC[e.op]
    # operators associate to the left, so the right operand needs the tighter context
    right = to_text(e.right, prec + 1)
    out = f"{to_text(e.left, prec)} {e.op} {right}" if prec == 1 else f"{to_text(e.left, prec)}*{right}"
    return f"({out})" if _ctx > prec else out
