"""Sorted first-order formulas over exponential fields.

Atoms hold polynomial text (``exp(x)`` allowed inside), so a formula prints
the way it reads. Definable side conditions such as "dim V >= n" or
membership in V^gf are not first-order atoms; they are kept as annotations
and printed with a leading ``@``.

Text form is a prefix s-expression::

    (formula "name" (free (a field)) (notes "...")
      (forall-ker (k1) (or (= "x1 - k1") (@ dim-ge ("k1") "V >= 1"))))
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

SORTS = ("field", "ker", "Z")
QUANTIFIERS = ("forall", "exists")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_BUILTINS = {"exp"}


class FormulaError(ValueError):
    pass


def term_names(text: str) -> set[str]:
    return {m for m in _IDENT.findall(text) if m not in _BUILTINS}


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Truth:
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Eq:
    """poly = 0"""
    poly: str


@dataclass(frozen=True)
class Neq:
    """poly != 0"""
    poly: str


@dataclass(frozen=True)
class ExpAtom:
    """exp(arg) = value"""
    arg: str
    value: str


@dataclass(frozen=True)
class InKer:
    term: str


@dataclass(frozen=True)
class Annot:
    """A definable side condition: ``tag`` names it, ``terms`` are the
    arguments it depends on, ``note`` is free prose (e.g. the family)."""
    tag: str
    terms: tuple = ()
    note: str = ""


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Quant:
    kind: str
    sort: str
    names: tuple
    body: object

    def __post_init__(self):
        if self.kind not in QUANTIFIERS:
            raise FormulaError(f"unknown quantifier {self.kind!r}")
        if self.sort not in SORTS:
            raise FormulaError(f"unknown sort {self.sort!r}")
        if not self.names:
            raise FormulaError("quantifier binds no variables")


@dataclass(frozen=True)
class Formula:
    """A named formula with declared free variables ((name, sort) pairs)."""
    name: str
    free: tuple
    body: object
    notes: tuple = ()

    def __str__(self):
        return to_text(self)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "free": [[n, s] for n, s in self.free],
            "notes": list(self.notes),
            "body": node_json(self.body),
        }


def conj(parts: Iterable) -> object:
    parts = tuple(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable) -> object:
    parts = tuple(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def forall(sort: str, names: Sequence[str], body) -> object:
    return Quant("forall", sort, tuple(names), body) if names else body


def exists(sort: str, names: Sequence[str], body) -> object:
    return Quant("exists", sort, tuple(names), body) if names else body


# ---------------------------------------------------------------- checks

def free_variables(node, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(node, Truth):
        return set()
    if isinstance(node, (Eq, Neq)):
        return term_names(node.poly) - bound
    if isinstance(node, ExpAtom):
        return (term_names(node.arg) | term_names(node.value)) - bound
    if isinstance(node, InKer):
        return term_names(node.term) - bound
    if isinstance(node, Annot):
        out = set()
        for t in node.terms:
            out |= term_names(t)
        return out - bound
    if isinstance(node, (And, Or)):
        out = set()
        for a in node.args:
            out |= free_variables(a, bound)
        return out
    if isinstance(node, Not):
        return free_variables(node.arg, bound)
    if isinstance(node, Implies):
        return free_variables(node.lhs, bound) | free_variables(node.rhs, bound)
    if isinstance(node, Quant):
        return free_variables(node.body, bound | frozenset(node.names))
    if isinstance(node, Formula):
        return free_variables(node.body, bound)
    raise FormulaError(f"not a formula node: {node!r}")


def check_well_formed(f: Formula) -> list[str]:
    """Problems with ``f``: undeclared free variables, names bound twice on
    one branch, a name declared with two sorts."""
    problems = []
    sorts: dict[str, str] = {}
    for n, s in f.free:
        if s not in SORTS:
            problems.append(f"free variable {n} has unknown sort {s}")
        if n in sorts:
            problems.append(f"free variable {n} declared twice")
        sorts[n] = s

    def walk(node, scope: dict):
        if isinstance(node, Quant):
            inner = dict(scope)
            for n in node.names:
                if n in inner:
                    problems.append(f"{n} rebound by {node.kind}-{node.sort}")
                inner[n] = node.sort
            walk(node.body, inner)
        elif isinstance(node, (And, Or)):
            for a in node.args:
                walk(a, scope)
        elif isinstance(node, Not):
            walk(node.arg, scope)
        elif isinstance(node, Implies):
            walk(node.lhs, scope)
            walk(node.rhs, scope)

    walk(f.body, dict(sorts))
    loose = free_variables(f.body) - set(sorts)
    for n in sorted(loose):
        problems.append(f"free variable {n} is not declared")
    return problems


# ---------------------------------------------------------------- printing

def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _flat(node) -> str:
    if isinstance(node, Truth):
        return "true" if node.value else "false"
    if isinstance(node, Eq):
        return f"(= {_q(node.poly)})"
    if isinstance(node, Neq):
        return f"(!= {_q(node.poly)})"
    if isinstance(node, ExpAtom):
        return f"(exp {_q(node.arg)} {_q(node.value)})"
    if isinstance(node, InKer):
        return f"(ker {_q(node.term)})"
    if isinstance(node, Annot):
        terms = " ".join(_q(t) for t in node.terms)
        return f"(@ {node.tag} ({terms}) {_q(node.note)})"
    return None


def _render(node, indent: int, out: list[str]):
    pad = "  " * indent
    flat = _flat(node)
    if flat is not None:
        out.append(pad + flat)
        return
    if isinstance(node, (And, Or, Not, Implies)):
        head = {And: "and", Or: "or", Not: "not", Implies: "->"}[type(node)]
        kids = node.args if isinstance(node, (And, Or)) else (
            (node.arg,) if isinstance(node, Not) else (node.lhs, node.rhs))
        out.append(f"{pad}({head}")
        for k in kids:
            _render(k, indent + 1, out)
        out[-1] += ")"
        return
    if isinstance(node, Quant):
        out.append(f"{pad}({node.kind}-{node.sort} ({' '.join(node.names)})")
        _render(node.body, indent + 1, out)
        out[-1] += ")"
        return
    raise FormulaError(f"not a formula node: {node!r}")


def to_text(f: Formula) -> str:
    free = " ".join(f"({n} {s})" for n, s in f.free)
    notes = " ".join(_q(n) for n in f.notes)
    out = [f"(formula {_q(f.name)} (free{' ' + free if free else ''}) (notes{' ' + notes if notes else ''})"]
    _render(f.body, 1, out)
    out[-1] += ")"
    return "\n".join(out) + "\n"


def node_json(node) -> dict:
    if isinstance(node, Truth):
        return {"op": "true" if node.value else "false"}
    if isinstance(node, Eq):
        return {"op": "=", "poly": node.poly}
    if isinstance(node, Neq):
        return {"op": "!=", "poly": node.poly}
    if isinstance(node, ExpAtom):
        return {"op": "exp", "arg": node.arg, "value": node.value}
    if isinstance(node, InKer):
        return {"op": "ker", "term": node.term}
    if isinstance(node, Annot):
        return {"op": "@", "tag": node.tag, "terms": list(node.terms), "note": node.note,
                "annotation": True}
    if isinstance(node, (And, Or)):
        return {"op": "and" if isinstance(node, And) else "or", "args": [node_json(a) for a in node.args]}
    if isinstance(node, Not):
        return {"op": "not", "arg": node_json(node.arg)}
    if isinstance(node, Implies):
        return {"op": "->", "lhs": node_json(node.lhs), "rhs": node_json(node.rhs)}
    if isinstance(node, Quant):
        return {"op": node.kind, "sort": node.sort, "vars": list(node.names), "body": node_json(node.body)}
    raise FormulaError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()"]+))')


def _tokens(text: str) -> list:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaError(f"unexpected character at offset {pos}")
        pos = m.end()
        if m.group(1):
            out.append("(")
        elif m.group(2):
            out.append(")")
        elif m.group(3):
            out.append(("str", json.loads(m.group(3))))
        else:
            out.append(("sym", m.group(4)))
    return out


def _tree(tokens: list, i: int = 0):
    t = tokens[i]
    if t == "(":
        items, i = [], i + 1
        while i < len(tokens) and tokens[i] != ")":
            item, i = _tree(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise FormulaError("unbalanced parentheses")
        return items, i + 1
    if t == ")":
        raise FormulaError("unexpected ')'")
    return t, i + 1


def _str(x) -> str:
    if not (isinstance(x, tuple) and x[0] == "str"):
        raise FormulaError(f"expected a quoted string, got {x!r}")
    return x[1]


def _sym(x) -> str:
    if not (isinstance(x, tuple) and x[0] == "sym"):
        raise FormulaError(f"expected a symbol, got {x!r}")
    return x[1]


def _node(tree):
    if isinstance(tree, tuple):
        s = _sym(tree)
        if s in ("true", "false"):
            return Truth(s == "true")
        raise FormulaError(f"unknown atom {s!r}")
    if not tree:
        raise FormulaError("empty list")
    head = _sym(tree[0])
    args = tree[1:]
    if head == "=":
        return Eq(_str(args[0]))
    if head == "!=":
        return Neq(_str(args[0]))
    if head == "exp":
        return ExpAtom(_str(args[0]), _str(args[1]))
    if head == "ker":
        return InKer(_str(args[0]))
    if head == "@":
        if len(args) != 3 or not isinstance(args[1], list):
            raise FormulaError("annotation needs a tag, a term list and a note")
        return Annot(_sym(args[0]), tuple(_str(t) for t in args[1]), _str(args[2]))
    if head in ("and", "or"):
        kids = tuple(_node(a) for a in args)
        return And(kids) if head == "and" else Or(kids)
    if head == "not":
        return Not(_node(args[0]))
    if head == "->":
        return Implies(_node(args[0]), _node(args[1]))
    if "-" in head:
        kind, sort = head.split("-", 1)
        if kind in QUANTIFIERS:
            if len(args) != 2 or not isinstance(args[0], list):
                raise FormulaError(f"{head} needs a variable list and a body")
            return Quant(kind, sort, tuple(_sym(v) for v in args[0]), _node(args[1]))
    raise FormulaError(f"unknown head {head!r}")


def parse_formula(text: str) -> Formula:
    toks = _tokens(text)
    if not toks:
        raise FormulaError("empty input")
    tree, end = _tree(toks)
    if end != len(toks):
        raise FormulaError("trailing input after formula")
    if not isinstance(tree, list) or len(tree) != 5 or _sym(tree[0]) != "formula":
        raise FormulaError("expected (formula name (free ...) (notes ...) body)")
    name = _str(tree[1])
    free_part, notes_part = tree[2], tree[3]
    if not isinstance(free_part, list) or _sym(free_part[0]) != "free":
        raise FormulaError("expected (free ...)")
    if not isinstance(notes_part, list) or _sym(notes_part[0]) != "notes":
        raise FormulaError("expected (notes ...)")
    free = []
    for d in free_part[1:]:
        if not isinstance(d, list) or len(d) != 2:
            raise FormulaError("free variable declarations are (name sort)")
        free.append((_sym(d[0]), _sym(d[1])))
    notes = tuple(_str(n) for n in notes_part[1:])
    return Formula(name, tuple(free), _node(tree[4]), notes)
