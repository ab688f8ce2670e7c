"""Subvarieties of G^n = (G_a x G_m)^n: matrix actions, freeness, rotundity,
Kummer probes and the reductions used to simplify EAC instances."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .linalg import IntMat
from .poly import (
    EMPTY_DIM,
    GroebnerBudgetError,
    IdealBasis,
    RatPoly,
    VarContext,
    affine_linear_relations,
    block_order,
    eliminate,
    fresh_name,
    monomial_binomial,
    saturate,
)
from .torus import dimension, monomial_image, param_names, product_of, project_to_torus


class PreconditionError(ValueError):
    pass


class GenericityError(RuntimeError):
    pass


def g_context(n: int, params: Sequence[str] = ()) -> VarContext:
    return VarContext.g_coordinates(n, params)


class GVariety:
    """V inside (G_a x G_m)^n, optionally over parameters (dimensions are then
    taken over Q(params)). The ideal is saturated at y1*...*yn."""

    def __init__(self, n: int, gens: Iterable[RatPoly] = (), params: Sequence[str] = (),
                 ctx: VarContext | None = None, _saturated: bool = False):
        ctx = ctx or g_context(n, params)
        if len(ctx.with_role("additive")) != n or len(ctx.with_role("multiplicative")) != n:
            raise ValueError(f"context must carry {n} additive and {n} multiplicative coordinates")
        self.n = n
        self.ctx = ctx
        ideal = IdealBasis(ctx, gens)
        if not _saturated:
            ideal = saturate(ideal, product_of(ctx, ctx.with_role("multiplicative")))
        self.ideal = ideal
        self._dim: int | None = None

    @property
    def params(self) -> tuple[str, ...]:
        return param_names(self.ctx)

    @property
    def xs(self) -> tuple[str, ...]:
        return self.ctx.with_role("additive")

    @property
    def ys(self) -> tuple[str, ...]:
        return self.ctx.with_role("multiplicative")

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = dimension(self.ideal)
        return self._dim

    def var(self, name: str) -> RatPoly:
        return RatPoly.var(self.ctx, name)

    def generators(self) -> list[RatPoly]:
        return self.ideal.reduced().gens

    def equals(self, other: GVariety) -> bool:
        return self.ctx == other.ctx and self.ideal.equals(other.ideal)

    def __repr__(self):
        return f"GVariety(n={self.n}, [{', '.join(str(g) for g in self.generators())}])"


# ---------------------------------------------------------------- action

def act(M: IntMat, V: GVariety) -> GVariety:
    """Closure of {(Mx, y^M) : (x, y) in V} in G^r."""
    if M.cols != V.n:
        raise ValueError("matrix column count must equal n")
    ctx = V.ctx
    us, vs = [], []
    for j in range(M.rows):
        u = fresh_name(ctx, f"_u{j + 1}")
        ctx = ctx.extend([u], "auxiliary")
        v = fresh_name(ctx, f"_v{j + 1}")
        ctx = ctx.extend([v], "auxiliary")
        us.append(u)
        vs.append(v)
    xs, ys = V.xs, V.ys
    gens = [g.embed(ctx) for g in V.ideal.gens]
    for j in range(M.rows):
        row = M.row(j)
        lin = RatPoly.var(ctx, us[j])
        for x, k in zip(xs, row):
            if k:
                lin = lin - RatPoly.var(ctx, x).scale(k)
        gens.append(lin)
        gens.append(monomial_binomial(ctx, row, ys, lhs=RatPoly.var(ctx, vs[j])))
    big = IdealBasis(ctx, gens)
    if any(k < 0 for k in M.entries):
        big = saturate(big, product_of(ctx, ys))
    img = eliminate(big, list(xs) + list(ys))
    out = g_context(M.rows, V.params)
    rename = {u: f"x{j + 1}" for j, u in enumerate(us)}
    rename.update({v: f"y{j + 1}" for j, v in enumerate(vs)})
    return GVariety(M.rows, [g.embed(out, rename) for g in img.gens], ctx=out)


def image_dim(M: IntMat, V: GVariety) -> int:
    return act(M, V).dim


# ---------------------------------------------------------------- freeness

@dataclass
class FreenessReport:
    additively_free: bool
    additive_witness: tuple | None
    mult_height: int
    multiplicatively_free: bool
    multiplicative_witness: tuple | None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "additively_free": self.additively_free,
            "additive_witness": list(self.additive_witness) if self.additive_witness else None,
            "multiplicatively_free_up_to": {
                "height": self.mult_height,
                "free": self.multiplicatively_free,
                "witness": list(self.multiplicative_witness) if self.multiplicative_witness else None,
            },
            "notes": list(self.notes),
        }


def additively_free(V: GVariety) -> tuple[bool, tuple | None]:
    """Exact test for a relation sum m_i x_i = c holding on V.

    Without parameters the witness is (m_1..m_n, -c) with c rational, so that
    sum m_i x_i + witness[-1] lies in I(V). Over parameters c lies in Q(params)
    and the witness is (m_1..m_n, None).
    """
    xs = [V.var(x) for x in V.xs]
    if not V.params:
        rels = affine_linear_relations(V.ideal, xs)
        for r in rels:
            if any(r[:-1]):
                return False, tuple(r)
        if rels:
            # only a constant relation: the ideal is the unit ideal
            return False, tuple(rels[0])
        return True, None
    basis = _linear_relations_over_params(V)
    if basis:
        return False, tuple(basis[0]) + (None,)
    return True, None


def _linear_relations_over_params(V: GVariety) -> list[tuple[int, ...]]:
    """Q-basis of {m in Q^n : sum m_i x_i is in I(V) + Q(params) after
    extending scalars to Q(params)}."""
    import sympy
    from sympy.polys.domains import QQ
    from sympy.polys.matrices import DomainMatrix

    # Affine forms in x lie in I(V) n Q[x, params]; extended to K = Q(params),
    # a block basis (x >> params, graded on x) is a graded basis over K, so the
    # affine forms of the extended ideal are spanned by its x-degree <= 1 members.
    A_ideal = eliminate(V.ideal, V.ys)
    ctx = A_ideal.ctx
    params = list(V.params)
    gb = A_ideal.groebner(block_order(ctx, list(V.xs), params))
    pidx = [ctx.index(p) for p in params]
    ps = sympy.symbols(params)
    K = QQ.frac_field(*ps)
    xidx = [ctx.index(x) for x in V.xs]
    rows = []
    for lm, g in zip(gb.leads, gb.polys):
        xdeg = sum(lm[i] for i in xidx)
        if xdeg == 0:
            # a nonzero polynomial in the parameters alone: empty over K
            return [tuple(int(i == 0) for i in range(V.n))] if V.n else []
        if xdeg != 1:
            continue
        coeffs = [K.zero] * V.n
        for m, c in g.terms.items():
            mono = sympy.Rational(c.numerator, c.denominator)
            for sym, i in zip(ps, pidx):
                mono *= sym ** m[i]
            for j, i in enumerate(xidx):
                if m[i] == 1:
                    coeffs[j] += K.from_sympy(mono)
        rows.append(coeffs)
    if not rows:
        return []
    A = DomainMatrix(rows, (len(rows), V.n), K)
    null = A.nullspace().to_Matrix()
    # m must be orthogonal to every null vector, identically in the parameters
    eqs: list[list[Fraction]] = []
    for k in range(null.rows):
        vec = [sympy.together(null[k, j]) for j in range(V.n)]
        den = sympy.lcm([sympy.fraction(e)[1] for e in vec])
        polys = [sympy.Poly(sympy.expand(e * den), *ps) for e in vec]
        monos = sorted({mm for p in polys for mm in p.as_dict()})
        for mm in monos:
            eqs.append([Fraction(str(p.as_dict().get(mm, 0))) for p in polys])
    if not eqs:
        return [linalg.primitive([int(i == j) for j in range(V.n)]) for i in range(V.n)]
    return linalg.nullspace(eqs, V.n)


def multiplicatively_free_up_to(V: GVariety, height: int) -> tuple[bool, tuple | None]:
    """Search primitive m with max|m_i| <= height for y^m constant on V."""
    if height < 1:
        raise ValueError("height must be at least 1")
    W = project_to_torus(V)
    for M in linalg.enumerate_canonical_matrices(V.n, 1, height):
        if M.rows > 1:
            break
        if monomial_image(W, M).dim == 0:
            return False, M.row(0)
    return True, None


def freeness_report(V: GVariety, height: int) -> FreenessReport:
    af, aw = additively_free(V)
    mf, mw = multiplicatively_free_up_to(V, height)
    notes = []
    if V.params:
        notes.append("relations are taken over Q(" + ",".join(V.params) + ")")
    notes.append("additive relations with irrational algebraic constants are not detected")
    return FreenessReport(af, aw, height, mf, mw, notes)


# ---------------------------------------------------------------- rotundity

@dataclass
class RotundityVerdict:
    status: str  # 'certified-up-to-depth' | 'not-rotund'
    depth: int
    witness: IntMat | None = None
    witness_dim: int | None = None
    witness_rank: int | None = None
    checked_count: int = 0
    complete: bool = True
    irreducibility_unverified: bool = True

    @property
    def rotund(self) -> bool:
        return self.status == "certified-up-to-depth"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "depth": self.depth,
            "witness": self.witness.to_rows() if self.witness is not None else None,
            "witness_image_dim": self.witness_dim,
            "witness_rank": self.witness_rank,
            "checked_count": self.checked_count,
            "complete": self.complete,
            "irreducibility_unverified": self.irreducibility_unverified,
        }


class _ImageBounds:
    """Exact lower bounds for dim M.V that avoid a Groebner basis per matrix.

    dim M.V is at least the dimension of the image of pr_x(V) under x -> Mx,
    and of pr_y(V) under y -> y^M. When pr_x(V) is an affine subspace, or
    pr_y(V) a coset of a subtorus, that image dimension is the rank of M on
    the tangent directions, which is plain linear algebra.
    """

    def __init__(self, V: GVariety):
        self.V = V
        self._dirs: list[list[Fraction]] | None = None

    def directions(self) -> list[list[list[Fraction]]]:
        if self._dirs is None:
            self._dirs = [d for d in (self._additive(), self._multiplicative()) if d is not None]
        return self._dirs

    def _additive(self):
        V = self.V
        A = eliminate(V.ideal, V.ys)
        rows = []
        for g in A.reduced().gens:
            if g.support() & set(V.params) or g.total_degree() > 1:
                return None
            rows.append([g.terms.get(_unit(A.ctx, x), Fraction(0)) for x in V.xs])
        return _columns(linalg.nullspace(rows, V.n) if rows else _identity(V.n))

    def _multiplicative(self):
        V = self.V
        P = project_to_torus(V)
        rows = []
        for g in P.ideal.reduced().gens:
            if g.support() & set(V.params) or len(g.terms) != 2:
                return None
            m1, m2 = list(g.terms)
            ys = [P.ctx.index(y) for y in P.ctx.with_role("multiplicative")]
            rows.append([m1[i] - m2[i] for i in ys])
        return _columns(linalg.nullspace(rows, V.n) if rows else _identity(V.n))

    def lower_bound(self, M: IntMat) -> int:
        best = 0
        for B in self.directions():
            if not B or not B[0]:
                continue
            prod = [[sum(M[i, k] * B[k][j] for k in range(M.cols)) for j in range(len(B[0]))]
                    for i in range(M.rows)]
            best = max(best, linalg.rational_rank(prod))
        return best


def _unit(ctx: VarContext, name: str) -> tuple[int, ...]:
    e = [0] * ctx.nvars
    e[ctx.index(name)] = 1
    return tuple(e)


def _identity(n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def _columns(vectors) -> list[list[Fraction]]:
    """n x k matrix whose columns are the given length-n vectors."""
    vectors = list(vectors)
    if not vectors:
        return []
    return [[Fraction(v[i]) for v in vectors] for i in range(len(vectors[0]))]


def rotund_up_to(V: GVariety, depth: int) -> RotundityVerdict:
    """dim M.V >= rk M over canonical row spaces of height <= depth.

    The image dimension depends only on the rational row space of M; for rank
    n the action is finite-to-one so dim M.V = dim V.
    """
    verdict = RotundityVerdict("certified-up-to-depth", depth)
    bounds = _ImageBounds(V)
    try:
        for M in linalg.enumerate_canonical_matrices(V.n, 1, depth):
            r = M.rows
            verdict.checked_count += 1
            if r == V.n:
                d = V.dim
            elif bounds.lower_bound(M) >= r:
                continue
            else:
                d = image_dim(M, V)
            if d < r:
                verdict.status = "not-rotund"
                verdict.witness = M
                verdict.witness_dim = d
                verdict.witness_rank = r
                return verdict
    except GroebnerBudgetError as e:
        verdict.complete = False
        e.partial = verdict
        raise
    return verdict


# ---------------------------------------------------------------- Kummer

def pullback(V: GVariety, m: int) -> IdealBasis:
    """Ideal of {(x, y) : (m x, y^m) in V}."""
    ctx = V.ctx
    images = {}
    for x in V.xs:
        images[x] = RatPoly.var(ctx, x).scale(m)
    for y in V.ys:
        images[y] = RatPoly.var(ctx, y) ** m
    gens = [g.substitute(images, ctx) for g in V.ideal.gens]
    return saturate(IdealBasis(ctx, gens), product_of(ctx, V.ys))


def _to_sympy(p: RatPoly):
    import sympy

    syms = sympy.symbols(p.ctx.names)
    expr = sympy.Integer(0)
    for mono, c in p.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, mono):
            if k:
                t *= s ** k
        expr += t
    return expr, syms


def principal_irreducible(p: RatPoly) -> bool:
    """Irreducibility over Q of the zero set of a single polynomial: exactly
    one distinct nonconstant factor."""
    import sympy

    expr, syms = _to_sympy(p)
    used = [s for s, n in zip(syms, p.ctx.names) if n in p.support()]
    _, factors = sympy.factor_list(expr, *used)
    return len([f for f, _ in factors if f.free_symbols]) == 1


def kummer_generic_probe(V: GVariety, m_max: int) -> dict[int, str]:
    out = {}
    for m in range(1, m_max + 1):
        P = pullback(V, m)
        gb = P.groebner()
        if gb.is_zero():
            out[m] = "irreducible"
            continue
        if gb.is_unit():
            out[m] = "reducible"  # empty pullback; cannot be irreducible
            continue
        polys = gb.polys
        if len(polys) == 1 and len(polys[0].support()) <= 2:
            out[m] = "irreducible" if principal_irreducible(polys[0]) else "reducible"
        else:
            out[m] = "unknown"
    return out


# ---------------------------------------------------------------- reductions

@dataclass
class CutResult:
    variety: GVariety
    coefficients: tuple[int, ...]
    check_coefficients: tuple[int, ...]
    attempts: int


def hyperplane(ctx: VarContext, n: int, a: Sequence[int]) -> RatPoly:
    h = RatPoly.const(ctx, -1)
    for i in range(n):
        h = h + RatPoly.var(ctx, f"x{i + 1}").scale(a[i]) + RatPoly.var(ctx, f"y{i + 1}").scale(a[n + i])
    return h


def _draw(rng: random.Random, k: int, bound: int) -> tuple[int, ...]:
    out = []
    while len(out) < k:
        v = rng.randint(-bound, bound)
        if v:
            out.append(v)
    return tuple(out)


def generic_hyperplane_cut(V: GVariety, seed: int, *, coeff_range: int = 1000,
                           retries: int = 5) -> CutResult:
    """Intersect V with sum a_i x_i + a_(n+i) y_i = 1 for pseudo-random integer
    a; a second independent draw must agree on the dimension dim V - 1."""
    if V.dim < 1:
        raise PreconditionError("hyperplane cut needs dim V >= 1")
    rng = random.Random(seed)
    target = V.dim - 1
    for attempt in range(1, retries + 1):
        a = _draw(rng, 2 * V.n, coeff_range)
        b = _draw(rng, 2 * V.n, coeff_range)
        cut = GVariety(V.n, list(V.ideal.gens) + [hyperplane(V.ctx, V.n, a)], ctx=V.ctx)
        check = GVariety(V.n, list(V.ideal.gens) + [hyperplane(V.ctx, V.n, b)], ctx=V.ctx)
        if cut.dim == target and check.dim == target:
            return CutResult(cut, a, b, attempt)
    raise GenericityError(f"no generic hyperplane found after {retries} attempts")


@dataclass
class Reduction:
    variety: GVariety
    trail: list[str]


def _projection_drop_last(n: int) -> IntMat:
    return IntMat.from_rows([[int(i == j) for j in range(n)] for i in range(n - 1)], cols=n)


def _param_context(V: GVariety, base: str, role: str = "parameter"):
    name = fresh_name(V.ctx, base)
    return name, V.ctx.extend([name], role)


def mult_free_reduce(V: GVariety, witness: Sequence[int], symbol: str = "a") -> Reduction:
    """Given y^m constant on V (m_n != 0), cut by sum m_i x_i = a with a fresh
    parameter a (standing for a logarithm of that constant) and project away
    the last coordinate."""
    n = V.n
    if n < 2:
        raise PreconditionError("the multiplicative reduction needs n >= 2")
    m = tuple(witness)
    if len(m) != n or m[-1] == 0:
        raise PreconditionError("witness must have length n and nonzero last entry")
    W = project_to_torus(V)
    if monomial_image(W, IntMat.from_rows([m])).dim != 0:
        raise PreconditionError("witness does not hold on V: y^m is not constant")
    a, ctx = _param_context(V, symbol)
    lin = RatPoly.const(ctx, 0) - RatPoly.var(ctx, a)
    for i, k in enumerate(m):
        lin = lin + RatPoly.var(ctx, f"x{i + 1}").scale(k)
    Vp = GVariety(n, [g.embed(ctx) for g in V.ideal.gens] + [lin], ctx=ctx, _saturated=True)
    if Vp.dim == EMPTY_DIM:
        raise PreconditionError("m.x is constant on V as well, so V is not rotund")
    Vpp = act(_projection_drop_last(n), Vp)
    trail = [
        f"cut by {lin} = 0 ({a} a fresh parameter with exp({a}) = y^{list(m)} on V)",
        f"dim V' = {Vp.dim}",
        f"project by {_projection_drop_last(n)}, dim V'' = {Vpp.dim}",
    ]
    return Reduction(Vpp, trail)


def add_free_reduce(V: GVariety, witness: Sequence[int], symbol: str = "b") -> Reduction:
    """Dual of mult_free_reduce for sum m_i x_i constant on V: cut by
    y^m = b with a fresh multiplicative parameter b (the exponential of that
    constant) and project away the last coordinate."""
    n = V.n
    if n < 2:
        raise PreconditionError("the additive reduction needs n >= 2")
    m = tuple(int(k) for k in witness[:n])
    if m[-1] == 0:
        raise PreconditionError("witness must have nonzero last entry")
    b, ctx = _param_context(V, symbol)
    Vp = GVariety(n, [g.embed(ctx) for g in V.ideal.gens]
                  + [monomial_binomial(ctx, m, V.ys, lhs=RatPoly.var(ctx, b))], ctx=ctx)
    if Vp.dim == EMPTY_DIM:
        raise PreconditionError("y^m is constant on V as well, so V is not rotund")
    Vpp = act(_projection_drop_last(n), Vp)
    trail = [
        f"cut by y^{list(m)} = {b} ({b} a fresh parameter, the exponential of the constant)",
        f"dim V' = {Vp.dim}",
        f"project by {_projection_drop_last(n)}, dim V'' = {Vpp.dim}",
    ]
    return Reduction(Vpp, trail)


def rabinovich_extend(V: GVariety, g: RatPoly) -> GVariety:
    """W in G^(n+1) cut out by I(V) and g * x_(n+1) = 1, with y_(n+1) free."""
    n = V.n
    g = g if g.ctx == V.ctx else g.embed(V.ctx)
    if g.is_zero() or V.ideal.contains(g):
        raise PreconditionError("g vanishes identically on V")
    ctx = g_context(n + 1, V.params)
    u = RatPoly.var(ctx, f"x{n + 1}")
    gens = [h.embed(ctx) for h in V.ideal.gens] + [g.embed(ctx) * u - 1]
    W = GVariety(n + 1, gens, ctx=ctx)
    if W.dim == EMPTY_DIM:
        raise PreconditionError("g vanishes identically on V")
    return W
