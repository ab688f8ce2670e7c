"""Independent oracles. None of these go through the package's Groebner
engine or its normal-form code; they use sympy or plain Fraction
arithmetic on rational parametrizations."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy

from expfield.corpus import ParamVariety, _split
from expfield.poly import VarContext, parse_poly


def frac_rank(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


class ParamJacobian:
    """Jacobians of t -> (x(t), log y(t)) at random rational points."""

    def __init__(self, P: ParamVariety, points: int = 3, seed: int = 7):
        self.P = P
        ctx = VarContext.of(P.tnames())
        self.ts = P.tnames()
        self.xs = [parse_poly(x, ctx) for x in P.xs]
        self.ys = [tuple(parse_poly(s, ctx) for s in _split(y)) for y in P.ys]
        rng = random.Random(seed)
        self.rows = []
        while len(self.rows) < points:
            vals = {t: Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for t in self.ts}
            if any(num.evaluate(vals) == 0 or den.evaluate(vals) == 0 for num, den in self.ys):
                continue
            jx = [[x.diff(t).evaluate(vals) for t in self.ts] for x in self.xs]
            # d log(num/den) = num'/num - den'/den
            jy = [[num.diff(t).evaluate(vals) / num.evaluate(vals) - den.diff(t).evaluate(vals) / den.evaluate(vals)
                   for t in self.ts] for num, den in self.ys]
            self.rows.append((jx, jy))

    def image_dim(self, M) -> int:
        if not self.ts:
            return 0
        best = 0
        for jx, jy in self.rows:
            stacked = []
            for J in (jx, jy):
                for row in M:
                    stacked.append([sum(row[i] * J[i][k] for i in range(len(row))) for k in range(len(self.ts))])
            best = max(best, frac_rank(stacked))
        return best


def rotund_oracle(P: ParamVariety, depth: int) -> bool:
    """dim M.V >= rank M for every integer matrix with 1..n rows and
    entries bounded by depth, straight from the definition."""
    J = ParamJacobian(P)
    n = P.n
    entries = range(-depth, depth + 1)
    for r in range(1, n + 1):
        for flat in itertools.product(entries, repeat=r * n):
            M = [flat[i * n:(i + 1) * n] for i in range(r)]
            rk = frac_rank(M)
            if rk and J.image_dim(M) < rk:
                return False
    return True


def sympy_snf_invariants(rows) -> list[int]:
    from sympy.matrices.normalforms import smith_normal_form

    D = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def sympy_dimension(gens_text, names) -> int:
    """Krull dimension via a sympy Groebner basis and maximal independent
    sets of variables (brute force over subsets)."""
    syms = sympy.symbols(names)
    loc = dict(zip(names, syms))
    polys = [sympy.sympify(g, locals=loc) for g in gens_text]
    G = sympy.groebner(polys, *syms, order="grevlex")
    if list(G.exprs) == [1]:
        return -1
    leads = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    best = 0
    for k in range(len(syms), -1, -1):
        for sub in itertools.combinations(range(len(syms)), k):
            s = set(sub)
            if all(any(e and i not in s for i, e in enumerate(m)) for m in leads):
                return k
    return best
