"""Tiny arithmetic-expression language for real functions of one variable.

Users supply the function f under study as text like ``"abs(x-1/2)"`` or
``"x^3 - 2*x"``.  The grammar has standard precedence (``^`` above unary
minus above ``*``, ``/`` above ``+``, ``-``), ``^`` is right-associative,
and the only identifiers are ``x`` and the builtin functions abs, sqrt,
exp, log, sin, cos.  Numbers are decimal literals; scientific notation is
accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import DomainError, ExprSyntaxError


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The free variable x."""


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = ("abs", "sqrt", "exp", "log", "sin", "cos")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[+\-*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # Skip over trailing whitespace before declaring an error.
            if text[pos:].strip() == "":
                break
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind == "op" and text == op:
            return self.advance()
        raise ExprSyntaxError(
            f"expected {op!r}", pos, expected=op
        )

    def parse(self) -> Expr:
        e = self.parse_sum()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", pos)
        return e

    def parse_sum(self) -> Expr:
        e = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = BinOp(text, e, self.parse_term())
            else:
                return e

    def parse_term(self) -> Expr:
        e = self.parse_unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = BinOp(text, e, self.parse_unary())
            else:
                return e

    def parse_unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            # Right-associative; the exponent may carry a unary minus.
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text == "x":
                return Var()
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_sum()
                self.expect_op(")")
                return Call(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.parse_sum()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"expected a number, 'x', a function call or '('", pos
        )


def parse(text: str) -> Expr:
    """Parse expression text into an AST; raises :class:`ExprSyntaxError`
    with the byte offset on malformed input."""
    return _Parser(text).parse()


def _pow(base: float, exponent: float, x: float) -> float:
    try:
        return math.pow(base, exponent)
    except (ValueError, OverflowError) as exc:
        raise DomainError(f"{base!r} ^ {exponent!r} undefined at x={x!r}: {exc}", x=x)


def _call(name: str, v: float, x: float) -> float:
    try:
        if name == "abs":
            return abs(v)
        if name == "sqrt":
            return math.sqrt(v)
        if name == "exp":
            return math.exp(v)
        if name == "log":
            return math.log(v)
        if name == "sin":
            return math.sin(v)
        return math.cos(v)
    except (ValueError, OverflowError) as exc:
        raise DomainError(f"{name}({v!r}) undefined at x={x!r}: {exc}", x=x)


def evaluate(e: Expr, x: float) -> float:
    """IEEE double evaluation of the tree at the point x."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return float(x)
    if isinstance(e, Neg):
        return -evaluate(e.operand, x)
    if isinstance(e, Call):
        return _call(e.name, evaluate(e.arg, x), x)
    left = evaluate(e.left, x)
    right = evaluate(e.right, x)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        if right == 0.0:
            raise DomainError(f"division by zero at x={x!r}", x=x)
        return left / right
    return _pow(left, right, x)


# Precedence levels used by the printer; must mirror the parser.
_LEVEL_SUM, _LEVEL_TERM, _LEVEL_UNARY, _LEVEL_POWER, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expr) -> int:
    if isinstance(e, (Num, Var, Call)):
        return _LEVEL_ATOM
    if isinstance(e, Neg):
        return _LEVEL_UNARY
    return {"+": _LEVEL_SUM, "-": _LEVEL_SUM, "*": _LEVEL_TERM,
            "/": _LEVEL_TERM, "^": _LEVEL_POWER}[e.op]


def _fmt(e: Expr, minimum: int) -> str:
    lvl = _level(e)
    if isinstance(e, Num):
        s = repr(e.value)
    elif isinstance(e, Var):
        s = "x"
    elif isinstance(e, Call):
        s = f"{e.name}({_fmt(e.arg, _LEVEL_SUM)})"
    elif isinstance(e, Neg):
        s = "-" + _fmt(e.operand, _LEVEL_UNARY)
    elif e.op == "^":
        # Right-associative; the base must be an atom, the exponent may be
        # any unary-level expression.
        s = _fmt(e.left, _LEVEL_ATOM) + "^" + _fmt(e.right, _LEVEL_UNARY)
    else:
        # Left-associative: parenthesize a same-level right operand.
        s = _fmt(e.left, lvl) + e.op + _fmt(e.right, lvl + 1)
    return "(" + s + ")" if lvl < minimum else s


def to_text(e: Expr) -> str:
    """Pretty-print with minimal parentheses; reparsing yields an equal tree."""
    return _fmt(e, _LEVEL_SUM)


def compile_expr(text: str) -> Callable[[float], float]:
    """Parse once and return a scalar callable."""
    tree = parse(text)

    def f(x: float) -> float:
        return evaluate(tree, x)

    f.expression = text  # type: ignore[attr-defined]
    return f
