"""Parser, evaluator, and u-differentiator for nonlinearities f(t, u).

Expressions use the grammar

    expr   := term  (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' factor)?
    unary  := '-' unary | atom
    atom   := number | 't' | 'u' | 'pi' | 'e'
            | ident '(' expr ')' | '(' expr ')'

with '^' right-associative and exactly the functions exp, ln, sin, cos,
abs, sqrt.  Numbers may carry scientific notation ("6528e9").  Evaluation
is numpy-aware: t and u may be floats or broadcastable arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityError,
    EvalDomainError,
    ExprSyntaxError,
    NonFiniteError,
    UnknownIdentifierError,
)

__all__ = [
    "ExprNode", "Num", "Var", "Const", "Neg", "BinOp", "Call",
    "parse", "evaluate", "diff_u", "to_string", "depends_on_u",
]


class ExprNode:
    """Immutable expression tree node."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(ExprNode):
    value: float


@dataclass(frozen=True)
class Var(ExprNode):
    name: str  # 't' or 'u'


@dataclass(frozen=True)
class Const(ExprNode):
    name: str  # 'pi' or 'e'


@dataclass(frozen=True)
class Neg(ExprNode):
    operand: ExprNode


@dataclass(frozen=True)
class BinOp(ExprNode):
    op: str  # '+', '-', '*', '/', '^'
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Call(ExprNode):
    func: str
    arg: ExprNode


_CONSTANTS = {"pi": math.pi, "e": math.e}

# 'sign' is emitted by diff_u for d|x|/dx and is not part of the input grammar.
_FUNCTIONS = {
    "exp": np.exp,
    "ln": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "sign": np.sign,
}
_PARSEABLE_FUNCTIONS = ("exp", "ln", "sin", "cos", "abs", "sqrt")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # skip over whitespace-only tails
            if text[pos:].strip() == "":
                break
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
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
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ExprSyntaxError(f"expected {op!r}", offset)
        return self.advance()

    def parse(self) -> ExprNode:
        node = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {value!r}", offset)
        return node

    def expr(self) -> ExprNode:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = BinOp(value, node, self.term())
            else:
                return node

    def term(self) -> ExprNode:
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.factor())
            else:
                return node

    def factor(self) -> ExprNode:
        base = self.unary()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return BinOp("^", base, self.factor())  # right-associative
        return base

    def unary(self) -> ExprNode:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> ExprNode:
        kind, value, offset = self.advance()
        if kind == "num":
            return Num(float(value))
        if kind == "ident":
            if value in ("t", "u"):
                return Var(value)
            if value in _CONSTANTS:
                return Const(value)
            if value in _PARSEABLE_FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                k2, v2, o2 = self.peek()
                if k2 == "op" and v2 == ",":
                    raise ArityError(f"function {value!r} takes exactly one argument")
                self.expect_op(")")
                return Call(value, arg)
            raise UnknownIdentifierError(value, offset)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"expected a number, variable, function, or '('", offset
        )


def parse(text: str) -> ExprNode:
    """Parse expression text into an AST.

    Raises ExprSyntaxError (with byte offset), UnknownIdentifierError, or
    ArityError on malformed input.
    """
    if not isinstance(text, str):
        raise ExprSyntaxError("expression must be a string", 0)
    if text.strip() == "":
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def _eval_node(node: ExprNode, t, u):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return t if node.name == "t" else u
    if isinstance(node, Const):
        return _CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval_node(node.operand, t, u)
    if isinstance(node, Call):
        return _FUNCTIONS[node.func](_eval_node(node.arg, t, u))
    if isinstance(node, BinOp):
        a = _eval_node(node.left, t, u)
        b = _eval_node(node.right, t, u)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        # power: 0^negative is a domain error, not an overflow
        if np.any((np.asarray(a) == 0.0) & (np.asarray(b) < 0.0)):
            raise EvalDomainError("0 raised to a negative power")
        return np.power(a, b)
    raise TypeError(f"not an ExprNode: {node!r}")


def evaluate(node: ExprNode, t, u):
    """Evaluate the expression at (t, u); scalars in, float out; arrays broadcast.

    NaN results (ln of nonpositive, sqrt of negative, ...) raise
    EvalDomainError; infinities (overflow) raise NonFiniteError.
    """
    scalar = np.isscalar(t) and np.isscalar(u)
    with np.errstate(all="ignore"):
        value = _eval_node(node, np.asarray(t, dtype=float), np.asarray(u, dtype=float))
    value = np.asarray(value, dtype=float)
    if np.isnan(value).any():
        raise EvalDomainError(f"expression undefined at sampled point: {to_string(node)}")
    if np.isinf(value).any():
        raise NonFiniteError(f"expression overflowed: {to_string(node)}")
    if scalar:
        return float(value)
    return value


def depends_on_u(node: ExprNode) -> bool:
    if isinstance(node, Var):
        return node.name == "u"
    if isinstance(node, Neg):
        return depends_on_u(node.operand)
    if isinstance(node, BinOp):
        return depends_on_u(node.left) or depends_on_u(node.right)
    if isinstance(node, Call):
        return depends_on_u(node.arg)
    return False


def _is_num(node: ExprNode, value: float) -> bool:
    return isinstance(node, Num) and node.value == value


def _add(a: ExprNode, b: ExprNode) -> ExprNode:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: ExprNode, b: ExprNode) -> ExprNode:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a: ExprNode, b: ExprNode) -> ExprNode:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a: ExprNode, b: ExprNode) -> ExprNode:
    if _is_num(a, 0.0):
        return Num(0.0)
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def diff_u(node: ExprNode) -> ExprNode:
    """Symbolic derivative with respect to u.

    d|x|/du uses sign(x)*x' with sign(0) = 0.
    """
    if isinstance(node, (Num, Const)):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0) if node.name == "u" else Num(0.0)
    if isinstance(node, Neg):
        inner = diff_u(node.operand)
        return Num(0.0) if _is_num(inner, 0.0) else Neg(inner)
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = diff_u(a), diff_u(b)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if node.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), BinOp("^", b, Num(2.0)))
        # power
        if not depends_on_u(b):
            # d(a^c) = c * a^(c-1) * a'
            return _mul(_mul(b, BinOp("^", a, _sub(b, Num(1.0)))), da)
        if not depends_on_u(a):
            # d(c^b) = c^b * ln(c) * b'
            return _mul(_mul(node, Call("ln", a)), db)
        # general: a^b * (b' ln a + b a'/a)
        return _mul(node, _add(_mul(db, Call("ln", a)), _mul(b, _div(da, a))))
    if isinstance(node, Call):
        g = node.arg
        dg = diff_u(g)
        if _is_num(dg, 0.0):
            return Num(0.0)
        if node.func == "exp":
            outer = Call("exp", g)
        elif node.func == "ln":
            return _div(dg, g)
        elif node.func == "sin":
            outer = Call("cos", g)
        elif node.func == "cos":
            outer = Neg(Call("sin", g))
        elif node.func == "sqrt":
            return _div(dg, _mul(Num(2.0), Call("sqrt", g)))
        elif node.func == "abs":
            outer = Call("sign", g)
        elif node.func == "sign":
            return Num(0.0)  # a.e. derivative; jump at 0 ignored
        else:
            raise ValueError(f"no derivative rule for {node.func!r}")
        return _mul(outer, dg)
    raise TypeError(f"not an ExprNode: {node!r}")


def to_string(node: ExprNode) -> str:
    """Fully parenthesized, re-parseable rendering of the AST."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_string(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_string(node.left)} {node.op} {to_string(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    raise TypeError(f"not an ExprNode: {node!r}")
