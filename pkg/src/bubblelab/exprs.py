"""Tiny expression language for family coefficients.

Grammar: integer/decimal literals, the variable ``n``, operators
``+ - * / ^`` with the usual precedence (``^`` binds tightest and is
right-associative), parentheses, ``sqrt``, and unary minus.  Whitespace is
insignificant.  Example: ``"1/(n^3)"``.

Expressions evaluate to complex numbers for integer ``n`` (sqrt of a
negative quantity is the principal complex root).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import ExpressionEvalError, ExpressionParseError

__all__ = ["Expr", "Num", "Var", "Neg", "Bin", "Sqrt", "parse_expression"]


class Expr:
    """Base class; subclasses implement eval(n) and to_str()."""

    def eval(self, n):
        raise NotImplementedError

    def to_str(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_str()!r})"


@dataclass(frozen=True, repr=False)
class Num(Expr):
    value: float

    def eval(self, n):
        return complex(self.value)

    def to_str(self):
        v = self.value
        return str(int(v)) if float(v).is_integer() else repr(float(v))


@dataclass(frozen=True, repr=False)
class Var(Expr):
    def eval(self, n):
        return complex(n)

    def to_str(self):
        return "n"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr

    def eval(self, n):
        return -self.arg.eval(n)

    def to_str(self):
        return f"-({self.arg.to_str()})"


@dataclass(frozen=True, repr=False)
class Sqrt(Expr):
    arg: Expr

    def eval(self, n):
        return cmath.sqrt(self.arg.eval(n))

    def to_str(self):
        return f"sqrt({self.arg.to_str()})"


@dataclass(frozen=True, repr=False)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def eval(self, n):
        a = self.left.eval(n)
        b = self.right.eval(n)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if b == 0:
                raise ExpressionEvalError(f"division by zero at n = {n}")
            return a / b
        if self.op == "^":
            if a == 0 and b.real < 0:
                raise ExpressionEvalError(f"zero raised to negative power at n = {n}")
            return a**b
        raise AssertionError(self.op)

    def to_str(self):
        return f"({self.left.to_str()}){self.op}({self.right.to_str()})"


# ---------------------------------------------------------------------------
# tokenizer / recursive-descent parser


_OPS = set("+-*/^()")


def _tokenize(text):
    tokens = []
    i, size = 0, len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            seen_dot = False
            while j < size and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            lit = text[i:j]
            if lit == ".":
                raise ExpressionParseError("stray '.'", i)
            tokens.append(("num", float(lit), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < size and text[j].isalpha():
                j += 1
            name = text[i:j]
            if name not in ("n", "sqrt"):
                raise ExpressionParseError(f"unknown name {name!r}", i)
            tokens.append((name, name, i))
            i = j
            continue
        raise ExpressionParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, size))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ExpressionParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionParseError(f"trailing input {tok[0]!r}", tok[2])
        return e

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            # right-associative; a signed exponent like n^-2 is allowed
            if self.peek()[0] == "-":
                self.take()
                return Bin("^", base, Neg(self.power_operand()))
            return Bin("^", base, self.power_operand())
        return base

    def power_operand(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            if self.peek()[0] == "-":
                self.take()
                return Bin("^", base, Neg(self.power_operand()))
            return Bin("^", base, self.power_operand())
        return base

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(value)
        if kind == "n":
            self.take()
            return Var()
        if kind == "sqrt":
            self.take()
            self.take("(")
            arg = self.expr()
            self.take(")")
            return Sqrt(arg)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise ExpressionParseError(f"unexpected token {kind!r}", pos)


def parse_expression(text):
    """Parse a coefficient expression in the variable n.

    Raises ExpressionParseError (with character position) on bad input.
    """
    if isinstance(text, Expr):
        return text
    if isinstance(text, (int, float)):
        return Num(float(text))
    return _Parser(str(text)).parse()
