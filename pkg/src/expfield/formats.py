"""Line-based file formats.

Every format is a list of ``key: value`` lines; ``#`` starts a comment.

.gv   G-variety       ``n: 2``, optional ``params: a, b``, then one generator
                      per line (bare, or after ``eq:``)
.mv   torus variety   the same, with generators in y1..yn
.ef   presentation    ``gens:``, ``relation:``, ``dspan:``, ``exp: e -> v``,
                      ``kernel: i j`` (1-based pair indices), ``tau: i``,
                      ``roots: L m=symbol ...``, ``stabilizer:``
.ks   Khovanskii      ``width: n``, optional ``coeffs: a, b``, then ``f:`` lines

Printers emit canonical text: reduced generators in sorted order, so that
parse(print(v)) describes the same object and print is a fixpoint.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

from .efield import EFieldPresentation, ExpPair
from .gvariety import GVariety, g_context
from .khovanskii import ExpPoly, KhovanskiiSystem
from .poly import ParseError, RatPoly, VarContext, format_poly, parse_poly
from .poly.parse import IDENT
from .torus import MultVariety, torus_context

KINDS = (".gv", ".mv", ".ef", ".ks")


@dataclass
class _Line:
    no: int
    key: str | None
    value: str
    col: int  # 1-based column where value starts


def _lines(text: str, source: str | None, keys: tuple[str, ...]) -> Iterator[_Line]:
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        lead = len(body) - len(body.lstrip())
        stripped = body.strip()
        head, sep, rest = stripped.partition(":")
        if sep and head.strip() in keys:
            offset = lead + len(head) + 1
            value = rest
            col = offset + (len(value) - len(value.lstrip())) + 1
            yield _Line(no, head.strip(), value.strip(), col)
        elif sep and IDENT.match(head.strip()) and " " not in head.strip():
            raise ParseError(f"unknown key {head.strip()!r}", no, lead + 1, source)
        else:
            yield _Line(no, None, stripped, lead + 1)


def _names(line: _Line, source) -> list[str]:
    out = [s.strip() for s in line.value.split(",") if s.strip()]
    for s in out:
        if not IDENT.match(s):
            raise ParseError(f"not a variable name: {s!r}", line.no, line.col, source)
    return out


def _int(line: _Line, source, minimum: int = 0) -> int:
    try:
        v = int(line.value)
    except ValueError:
        raise ParseError(f"expected an integer, got {line.value!r}", line.no, line.col, source) from None
    if v < minimum:
        raise ParseError(f"expected an integer >= {minimum}", line.no, line.col, source)
    return v


def _poly(line: _Line, ctx: VarContext, source) -> RatPoly:
    return parse_poly(line.value, ctx, line=line.no, col=line.col, source=source)


# ---------------------------------------------------------------- varieties

def _variety_lines(text: str, source, what: str):
    n, params, gens = None, [], []
    for ln in _lines(text, source, ("n", "params", "eq")):
        if ln.key == "n":
            if n is not None:
                raise ParseError("n given twice", ln.no, ln.col, source)
            n = _int(ln, source, 1)
        elif ln.key == "params":
            params = _names(ln, source)
        else:
            if n is None:
                raise ParseError(f"the {what} header must give n first", ln.no, ln.col, source)
            gens.append(ln)
    if n is None:
        raise ParseError(f"missing 'n:' line in {what} file", 1, 1, source)
    return n, params, gens


def parse_gv(text: str, source: str | None = None) -> GVariety:
    n, params, lines = _variety_lines(text, source, "G-variety")
    ctx = g_context(n, params)
    return GVariety(n, [_poly(ln, ctx, source) for ln in lines], ctx=ctx)


def _header(n: int, params) -> list[str]:
    out = [f"n: {n}"]
    if params:
        out.append("params: " + ", ".join(params))
    return out


def format_gv(V: GVariety) -> str:
    lines = _header(V.n, V.params) + sorted(format_poly(g) for g in V.generators())
    return "\n".join(lines) + "\n"


def parse_mv(text: str, source: str | None = None) -> MultVariety:
    n, params, lines = _variety_lines(text, source, "torus variety")
    ctx = torus_context(n, params)
    return MultVariety(n, [_poly(ln, ctx, source) for ln in lines], ctx)


def format_mv(W: MultVariety) -> str:
    from .torus import param_names

    lines = _header(W.n, param_names(W.ctx)) + sorted(format_poly(g) for g in W.generators())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- presentations

_EF_KEYS = ("gens", "relation", "dspan", "exp", "kernel", "tau", "roots", "stabilizer")


def parse_ef(text: str, source: str | None = None) -> EFieldPresentation:
    gens = None
    ctx = None
    relations, dspan, pairs, kernel, stabilizer = [], [], [], [], []
    tau, roots, level = None, {}, 0
    for ln in _lines(text, source, _EF_KEYS):
        if ln.key is None:
            raise ParseError("expected 'key: value'", ln.no, ln.col, source)
        if ln.key == "gens":
            if gens is not None:
                raise ParseError("gens given twice", ln.no, ln.col, source)
            gens = _names(ln, source)
            ctx = VarContext.of(gens, "auxiliary")
            continue
        if gens is None:
            raise ParseError("the first line must be 'gens:'", ln.no, ln.col, source)
        if ln.key == "relation":
            relations.append(_poly(ln, ctx, source))
        elif ln.key == "dspan":
            dspan.append(_poly(ln, ctx, source))
        elif ln.key == "stabilizer":
            stabilizer.append(_poly(ln, ctx, source))
        elif ln.key == "exp":
            if "->" not in ln.value:
                raise ParseError("exp lines read 'exp: element -> value'", ln.no, ln.col, source)
            left, right = ln.value.split("->", 1)
            e = parse_poly(left, ctx, line=ln.no, col=ln.col, source=source)
            v = parse_poly(right, ctx, line=ln.no, col=ln.col + len(left) + 2, source=source)
            pairs.append(ExpPair(e, v))
        elif ln.key == "kernel":
            for tok in ln.value.split():
                if not tok.isdigit() or int(tok) < 1:
                    raise ParseError(f"kernel entries are 1-based pair indices, got {tok!r}",
                                     ln.no, ln.col, source)
                kernel.append(int(tok) - 1)
        elif ln.key == "tau":
            tau = _int(ln, source, 1) - 1
        elif ln.key == "roots":
            toks = ln.value.split()
            if not toks or not toks[0].isdigit():
                raise ParseError("roots lines read 'roots: L m=symbol ...'", ln.no, ln.col, source)
            level = int(toks[0])
            for tok in toks[1:]:
                m, sep, sym = tok.partition("=")
                if not sep or not m.isdigit() or sym not in gens:
                    raise ParseError(f"bad root declaration {tok!r}", ln.no, ln.col, source)
                roots[int(m)] = sym
    if gens is None:
        raise ParseError("missing 'gens:' line", 1, 1, source)
    for i in kernel + ([tau] if tau is not None else []):
        if i >= len(pairs):
            raise ParseError(f"pair index {i + 1} out of range", 1, 1, source)
    return EFieldPresentation(gens, relations, dspan, pairs, kernel, tau, roots, level, stabilizer)


def format_ef(F: EFieldPresentation) -> str:
    return F.canonical()


# ---------------------------------------------------------------- Khovanskii systems

def parse_ks(text: str, source: str | None = None) -> KhovanskiiSystem:
    width, coeffs, fs = None, [], []
    for ln in _lines(text, source, ("width", "coeffs", "f")):
        if ln.key == "width":
            width = _int(ln, source, 0)
        elif ln.key == "coeffs":
            coeffs = _names(ln, source)
        elif ln.key == "f":
            if width is None:
                raise ParseError("'width:' must come before the equations", ln.no, ln.col, source)
            fs.append(ln)
        else:
            raise ParseError("expected 'f: expression'", ln.no, ln.col, source)
    if width is None:
        raise ParseError("missing 'width:' line", 1, 1, source)
    if len(fs) != width:
        raise ParseError(f"width {width} needs {width} equations, found {len(fs)}", 1, 1, source)
    polys = tuple(ExpPoly.parse(ln.value, width, coeffs, line=ln.no, col=ln.col, source=source) for ln in fs)
    return KhovanskiiSystem(polys)


def format_ks(S: KhovanskiiSystem) -> str:
    lines = [f"width: {S.width}"]
    if S.coeffs:
        lines.append("coeffs: " + ", ".join(S.coeffs))
    lines += [f"f: {f.text()}" for f in S.polys]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- dispatch

PARSERS = {".gv": parse_gv, ".mv": parse_mv, ".ef": parse_ef, ".ks": parse_ks}
PRINTERS = {".gv": format_gv, ".mv": format_mv, ".ef": format_ef, ".ks": format_ks}


def parse_text(text: str, kind: str, source: str | None = None):
    if kind not in PARSERS:
        raise ValueError(f"unknown input kind {kind!r}; expected one of {', '.join(KINDS)}")
    return PARSERS[kind](text, source)


def format_value(value, kind: str) -> str:
    return PRINTERS[kind](value)


def parse_inputs(path: str, kind: str | None = None):
    """Read and parse ``path``; the kind defaults to the file extension."""
    kind = kind or os.path.splitext(path)[1]
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_text(text, kind, source=path)
