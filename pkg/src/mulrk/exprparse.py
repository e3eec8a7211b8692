"""Small arithmetic expression language for user-supplied RHS functions.

Hand-rolled tokenizer and recursive-descent parser over the variables x, y,
the functions exp, ln, sqrt, sin, cos, and + - * / ^ with conventional
precedence: ^ binds tightest and associates right, then unary minus, then
* /, then + -.  Evaluation is complex throughout (negative and complex y
must work); ln takes the principal branch, phase continuity being the
solver's concern, not the evaluator's.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import EvalError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = {
    "exp": cmath.exp,
    "ln": cmath.log,
    "sqrt": cmath.sqrt,
    "sin": cmath.sin,
    "cos": cmath.cos,
}
VARIABLES = ("x", "y")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Unary, Binary, Call]


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "lparen" | "rparen" | "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    out = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^":
            out.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            out.append(_Token("lparen", c, i))
            i += 1
        elif c == ")":
            out.append(_Token("rparen", c, i))
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ExprSyntaxError(
                    f"malformed number {text!r} at offset {i}", i, "a number"
                ) from None
            out.append(_Token("num", text, i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            out.append(_Token("ident", src[i:j], i))
            i = j
        else:
            raise ExprSyntaxError(f"unexpected character {c!r} at offset {i}", i)
    out.append(_Token("end", "", n))
    return out


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str):
        tok = self.peek()
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(
            f"expected {expected} at offset {tok.offset}, found {what}",
            tok.offset,
            expected,
        )

    def expression(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            # right-associative; the exponent may carry a unary minus
            return Binary("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.take()
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                if self.peek().kind != "lparen":
                    self.fail(f"'(' after function {tok.text!r}")
                self.take()
                arg = self.expression()
                if self.peek().kind != "rparen":
                    self.fail("')'")
                self.take()
                return Call(tok.text, arg)
            raise UnknownIdentifier(tok.text, tok.offset)
        if tok.kind == "lparen":
            self.take()
            node = self.expression()
            if self.peek().kind != "rparen":
                self.fail("')'")
            self.take()
            return node
        self.fail("a value")


def parse(src: str) -> Expr:
    """Parse expression text to a tree; ExprSyntaxError/UnknownIdentifier on
    malformed input, with the byte offset of the problem."""
    parser = _Parser(_tokenize(src))
    node = parser.expression()
    if parser.peek().kind != "end":
        parser.fail("end of input or an operator")
    return node


def _check_finite(v: complex) -> complex:
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise EvalError(f"non-finite intermediate value {v!r}")
    return v


def evaluate(e: Expr, x: float, y: complex) -> complex:
    """Evaluate over complex arithmetic with x, y bound.

    EvalError on division by exact zero or any non-finite intermediate.
    """
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Var):
        return complex(x) if e.name == "x" else complex(y)
    if isinstance(e, Unary):
        return -evaluate(e.operand, x, y)
    if isinstance(e, Call):
        arg = evaluate(e.arg, x, y)
        try:
            return _check_finite(FUNCTIONS[e.fn](arg))
        except (ValueError, OverflowError) as exc:
            raise EvalError(f"{e.fn}({arg!r}) failed: {exc}") from exc
    lhs = evaluate(e.lhs, x, y)
    rhs = evaluate(e.rhs, x, y)
    try:
        if e.op == "+":
            return _check_finite(lhs + rhs)
        if e.op == "-":
            return _check_finite(lhs - rhs)
        if e.op == "*":
            return _check_finite(lhs * rhs)
        if e.op == "/":
            if rhs == 0:
                raise EvalError("division by zero")
            return _check_finite(lhs / rhs)
        if e.op == "^":
            return _check_finite(lhs**rhs)
    except (OverflowError, ValueError, ZeroDivisionError) as exc:
        raise EvalError(f"{e.op} failed on ({lhs!r}, {rhs!r}): {exc}") from exc
    raise EvalError(f"unknown operator {e.op!r}")


_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2, "unary": 3, "^": 4, "atom": 5}


def to_source(e: Expr) -> str:
    """Canonical text form; parse(to_source(parse(s))) == parse(s)."""

    def fmt(node: Expr, parent_level: int) -> str:
        if isinstance(node, Num):
            v = node.value
            text = str(int(v)) if v == int(v) and abs(v) < 1e16 else repr(v)
            return text
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Call):
            return f"{node.fn}({fmt(node.arg, 0)})"
        if isinstance(node, Unary):
            inner = fmt(node.operand, _LEVEL["unary"])
            text = f"-{inner}"
            level = _LEVEL["unary"]
        else:
            level = _LEVEL[node.op]
            if node.op == "^":
                # right-associative: parenthesize a compound base
                lhs = fmt(node.lhs, _LEVEL["atom"])
                rhs = fmt(node.rhs, _LEVEL["unary"])
            else:
                lhs = fmt(node.lhs, level)
                rhs = fmt(node.rhs, level + 1)
            text = f"{lhs} {node.op} {rhs}" if level == 1 else f"{lhs}{node.op}{rhs}"
        return f"({text})" if level < parent_level else text

    return fmt(e, 0)
