"""Recursive-descent parser for polynomial expressions over named variables.

Grammar (``^`` and ``**`` are synonyms, ``i`` is the imaginary unit)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('+'|'-') unary | power
    power  := atom (('^'|'**') INT)?
    atom   := INT | 'i' | NAME | '(' expr ')'

Division is only allowed by a nonzero constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .series import I, GaussianRational, TruncatedSeries

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 0-based offset in the expression


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", line, col0 + start + 1)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, variables, line, col0):
        self.variables = tuple(variables)
        self.line = line
        self.col0 = col0
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def error(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        raise ParseError(msg, self.line, self.col0 + tok.col + 1)

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> TruncatedSeries:
        if self.tok.kind == "end":
            self.error("empty expression")
        value = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected token {self.tok.text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if rhs.degree() not in (0,):
                    self.error("division only by a nonzero constant", op)
                value = value / rhs.constant_term()
        return value

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text in ("^", "**"):
            self.take()
            t = self.tok
            if t.kind != "num":
                self.error("exponent must be a nonnegative integer literal")
            self.take()
            return base ** int(t.text)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return TruncatedSeries.constant(int(t.text), self.variables)
        if t.kind == "name":
            self.take()
            if t.text == "i":
                return TruncatedSeries.constant(I, self.variables)
            if t.text not in self.variables:
                self.error(
                    f"unknown variable {t.text!r} (allowed: {', '.join(self.variables)})", t
                )
            return TruncatedSeries.var(t.text, self.variables)
        if t.kind == "op" and t.text == "(":
            self.take()
            v = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.error("expected ')'")
            self.take()
            return v
        if t.kind == "end":
            self.error("unexpected end of expression")
        self.error(f"unexpected token {t.text!r}")


def parse_expression(
    text: str, variables: Sequence[str], *, line: int = 1, column: int = 1
) -> TruncatedSeries:
    """Parse ``text`` into an exact polynomial over ``variables``.

    ``line``/``column`` locate the expression inside a larger file so that
    errors point at the right place.
    """
    return _Parser(text, variables, line, column - 1).parse()


def parse_coefficient(text: str) -> GaussianRational:
    """Parse a constant expression such as ``3/4*i`` or ``(1 + 2*i)``."""
    s = parse_expression(text, ())
    return s.constant_term()
