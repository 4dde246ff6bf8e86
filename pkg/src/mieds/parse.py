"""Plain-text vector field descriptions.

One component per line, infix syntax over ``x0 .. x{n-1}``::

    x1
    -x1 - 9.81*sin(x0)

Supported: numeric literals, ``+ - * /``, ``^`` with a non-negative integer
literal exponent, unary minus, parentheses, and ``sin cos tan tanh``.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re

from .expr import (
    Add,
    Const,
    Cos,
    Div,
    Expr,
    Mul,
    Neg,
    Pow,
    Sin,
    Sub,
    Tan,
    Tanh,
    Var,
    VectorField,
    max_var_index,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


FUNCTIONS = {"sin": Sin, "cos": Cos, "tan": Tan, "tanh": Tanh}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>x\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, line: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, line: int):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of line'!r}", tok)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            r = self.unary()
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                raise self.error("exponent must be a non-negative integer literal", tok)
            return Pow(base, int(tok[1]))
        return base

    def atom(self) -> Expr:
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Const(float(text))
        if kind == "var":
            return Var(int(text[1:]))
        if kind == "name":
            fn = FUNCTIONS.get(text)
            if fn is None:
                raise self.error(f"unknown function {text!r}", tok)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return fn(arg)
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {text or 'end of line'!r}", tok)


def parse_expr(text: str, line: int = 1) -> Expr:
    return _Parser(text, line).parse()


def parse_field(text: str) -> VectorField:
    """Parse a multi-line description; the dimension is the number of lines."""
    comps = []
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        comps.append(parse_expr(body, no))
        lines.append(no)
    if not comps:
        raise ParseError("empty field description", 1, 1)
    n = len(comps)
    for e, no in zip(comps, lines):
        if max_var_index(e) >= n:
            raise ParseError(f"variable x{max_var_index(e)} out of range for dimension {n}", no, 1)
    return VectorField(n, comps)


# formatting ---------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def format_expr(e: Expr) -> str:
    """Inverse of :func:`parse_expr` (fully parenthesised where needed)."""
    return _fmt(e, 0)


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Const):
        s = repr(float(e.value))
        if s.startswith("-") or "inf" in s or "nan" in s:
            return f"({s})" if s.startswith("-") else s
        return s
    if isinstance(e, Var):
        return f"x{e.index}"
    for name, cls in FUNCTIONS.items():
        if type(e) is cls:
            return f"{name}({_fmt(e.child, 0)})"
    prec = _PREC[type(e)]
    if isinstance(e, Neg):
        s = "-" + _fmt(e.child, prec)
    elif isinstance(e, Pow):
        s = f"{_fmt(e.child, prec + 1)}^{e.exponent}"
    else:
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        s = f"{_fmt(e.left, prec)} {op} {_fmt(e.right, prec + 1)}"
    return f"({s})" if prec < ctx or (prec == ctx and ctx == 3) else s


def format_field(field: VectorField) -> str:
    return "\n".join(format_expr(c) for c in field.components) + "\n"
