"""Textual form of elements: a printer and a recursive-descent parser.

Grammar (whitespace insignificant)::

    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := rational | generator ("^" natural)? | "(" expr ")" | "-" factor
    rational := integer ("/" positive-integer)?
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import GeneratorTable, SuperElement, UnknownGenerator


class ExpressionSyntaxError(SyntaxError):
    def __init__(self, message: str, source: str, pos: int, expected=()):
        self.source = source
        self.pos = pos
        self.expected = tuple(expected)
        detail = f"{message} at position {pos}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)


def _sort_key(item):
    mono, _ = item
    return (sum(e for _, e in mono), mono)


def format_coefficient(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(e: SuperElement) -> str:
    if not e.terms:
        return "0"
    gens = e.table.generators
    pieces = []
    for mono, c in sorted(e.terms.items(), key=_sort_key):
        factors = []
        for g, k in mono:
            name = gens[g].name
            factors.append(f"{name}^{k}" if k > 1 else name)
        mag = abs(c)
        if not factors:
            body = format_coefficient(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = format_coefficient(mag) + "*" + "*".join(factors)
        pieces.append((c < 0, body))
    neg, body = pieces[0]
    out = ("-" if neg else "") + body
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()])")


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), pos))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), pos))
        else:
            tokens.append(("op", m.group(3), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, table: GeneratorTable):
        self.src = src
        self.table = table
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, expected=()):
        tok = self.peek()
        raise ExpressionSyntaxError(message, self.src, tok[2], expected)

    def parse(self) -> SuperElement:
        if self.peek()[0] == "end":
            self.fail("empty expression", ("expression",))
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}", ("'+'", "'-'", "'*'", "end of input"))
        return value

    def expr(self) -> SuperElement:
        value = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> SuperElement:
        value = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            value = value * self.factor()
        return value

    def factor(self) -> SuperElement:
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return -self.factor()
        if kind == "op" and text == "(":
            self.take()
            value = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("unbalanced parenthesis", ("')'",))
            self.take()
            return value
        if kind == "int":
            self.take()
            num = int(text)
            den = 1
            if self.peek()[:2] == ("op", "/"):
                self.take()
                tok = self.peek()
                if tok[0] != "int" or int(tok[1]) == 0:
                    self.fail("bad denominator", ("positive integer",))
                den = int(self.take()[1])
            return self.table.const(Fraction(num, den))
        if kind == "name":
            self.take()
            if text not in self.table:
                raise UnknownGenerator(text)
            value = self.table.gen(text)
            if self.peek()[:2] == ("op", "^"):
                self.take()
                tok = self.peek()
                if tok[0] != "int":
                    self.fail("bad exponent", ("natural number",))
                value = value ** int(self.take()[1])
            return value
        self.fail(f"unexpected {text or 'end of input'!r}",
                  ("rational", "generator", "'('", "'-'"))


def parse_polynomial(src: str, table: GeneratorTable) -> SuperElement:
    """Parse ``src`` into a canonical element of ``table``'s algebra."""
    return _Parser(src, table).parse()
