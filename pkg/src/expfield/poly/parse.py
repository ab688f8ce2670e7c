"""Text grammar for polynomials (and exponential polynomials).

    expr     := sign? term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' natural)?
    base     := rational | identifier | '(' expr ')' | 'exp' '(' identifier ')'
    rational := integer ('/' positive-integer)?

The optional leading sign and the ``exp(...)`` form (only when a caller passes
``exp_map``) extend the bare grammar. Errors carry 1-based line/column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .ring import RatPoly, VarContext

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")
IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1, source: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


@dataclass
class _Tok:
    kind: str  # 'int', 'id', 'op', 'end'
    text: str
    pos: int


def _tokenize(text: str, line: int, col0: int, source: str | None) -> list[_Tok]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(_Tok("id", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", line, col0 + m.start(3), source)
            toks.append(_Tok("op", ch, m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.rstrip())))
    return toks


class _Parser:
    def __init__(self, text, ctx, exp_map, line, col0, source, new_var):
        self.toks = _tokenize(text, line, col0, source)
        self.i = 0
        self.ctx = ctx
        self.exp_map = exp_map
        self.line = line
        self.col0 = col0
        self.source = source
        self.new_var = new_var
        self.exp_depth = 0

    def err(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        raise ParseError(msg, self.line, self.col0 + tok.pos, self.source)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if t.kind != "op" or t.text != text:
            self.err(f"expected {text!r}")
        return self.take()

    def parse(self) -> RatPoly:
        if self.peek().kind == "end":
            self.err("empty expression")
        p = self.expr()
        if self.peek().kind != "end":
            self.err(f"unexpected {self.peek().text!r}")
        return p

    def expr(self) -> RatPoly:
        sign = 1
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            sign = -1 if t.text == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t.text == "+" else acc - rhs
            else:
                return acc

    def term(self) -> RatPoly:
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> RatPoly:
        b = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.peek()
            if t.kind != "int":
                self.err("expected a natural exponent")
            self.take()
            b = b ** int(t.text)
        return b

    def base(self) -> RatPoly:
        t = self.peek()
        if t.kind == "int":
            self.take()
            num = int(t.text)
            if self.peek().kind == "op" and self.peek().text == "/":
                self.take()
                d = self.peek()
                if d.kind != "int" or int(d.text) == 0:
                    self.err("expected a positive denominator")
                self.take()
                return RatPoly.const(self.ctx, Fraction(num, int(d.text)))
            return RatPoly.const(self.ctx, num)
        if t.kind == "id":
            self.take()
            if t.text == "exp" and self.peek().kind == "op" and self.peek().text == "(":
                return self.exp_call(t)
            return self.variable(t)
        if t.kind == "op" and t.text == "(":
            self.take()
            p = self.expr()
            self.expect(")")
            return p
        if t.kind == "end":
            self.err("unexpected end of expression")
        self.err(f"unexpected {t.text!r}")

    def variable(self, t: _Tok) -> RatPoly:
        if t.text not in self.ctx:
            if self.new_var is None:
                self.err(f"unknown variable {t.text!r}", t)
            self.ctx = self.new_var(t.text)
        return RatPoly.var(self.ctx, t.text)

    def exp_call(self, t: _Tok) -> RatPoly:
        if self.exp_map is None:
            self.err("exp(...) is not allowed here", t)
        self.expect("(")
        arg = self.peek()
        if arg.kind == "id" and arg.text == "exp":
            self.err("iterated exponentials are not allowed", arg)
        if arg.kind != "id":
            self.err("exp(...) takes a single variable", arg)
        self.take()
        if self.peek().kind != "op" or self.peek().text != ")":
            self.err("exp(...) takes a single variable")
        self.take()
        if arg.text not in self.exp_map:
            self.err(f"exp of unknown variable {arg.text!r}", arg)
        return RatPoly.var(self.ctx, self.exp_map[arg.text])


def parse_poly(text: str, ctx: VarContext, *, exp_map: Mapping[str, str] | None = None,
               line: int = 1, col: int = 1, source: str | None = None) -> RatPoly:
    """Parse ``text`` into a polynomial over ``ctx``.

    ``exp_map`` maps a variable name X to the name of the variable standing for
    e^X; when given, ``exp(X)`` is accepted.
    """
    return _Parser(text, ctx, exp_map, line, col, source, None).parse()


def parse_poly_auto(text: str, *, role: str = "auxiliary") -> RatPoly:
    """Parse, creating variables in order of first appearance."""
    state = {"ctx": VarContext((), ())}

    def new_var(name):
        state["ctx"] = state["ctx"].extend([name], role)
        return state["ctx"]

    parser = _Parser(text, state["ctx"], None, 1, 1, None, new_var)
    # Variables appear as we go, so parse once to learn the names, then again.
    parser.parse()
    return parse_poly(text, parser.ctx)


def _grevlex_key(m):
    return (sum(m), tuple(-k for k in reversed(m)))


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: RatPoly, *, namer: Callable[[str], str] | None = None) -> str:
    """Canonical text: terms in descending grevlex order of the context."""
    if not p.terms:
        return "0"
    names = p.ctx.names
    parts = []
    for m in sorted(p.terms, key=_grevlex_key, reverse=True):
        c = p.terms[m]
        mono = []
        for i, k in enumerate(m):
            if k:
                v = namer(names[i]) if namer else names[i]
                mono.append(v if k == 1 else f"{v}^{k}")
        a = abs(c)
        if not mono:
            body = format_rational(a)
        elif a == 1:
            body = "*".join(mono)
        else:
            body = format_rational(a) + "*" + "*".join(mono)
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out
