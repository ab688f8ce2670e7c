"""Algebraic subgroups of the torus G_m^n and subvarieties meeting them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .linalg import IntMat
from .poly import (
    EMPTY_DIM,
    GroebnerBudgetError,
    IdealBasis,
    RatPoly,
    VarContext,
    eliminate,
    fresh_name,
    monomial_binomial,
    saturate,
)


class TorusError(ValueError):
    pass


def torus_context(n: int, params: Sequence[str] = (), prefix: str = "y") -> VarContext:
    names = tuple(f"{prefix}{i}" for i in range(1, n + 1))
    return VarContext(names + tuple(params), ("multiplicative",) * n + ("parameter",) * len(params))


def mult_names(ctx: VarContext) -> tuple[str, ...]:
    return ctx.with_role("multiplicative")


def param_names(ctx: VarContext) -> tuple[str, ...]:
    return ctx.with_role("parameter")


def product_of(ctx: VarContext, names: Iterable[str]) -> RatPoly:
    return RatPoly.monomial(ctx, {n: 1 for n in names})


def dimension(ideal: IdealBasis) -> int:
    """Dimension over Q(parameters): parameter-role variables are ignored."""
    return ideal.dimension(ignoring=param_names(ideal.ctx))


# ---------------------------------------------------------------- subgroups

@dataclass(frozen=True)
class TorusSubgroup:
    """The subgroup of G_m^n cut out by y^m = 1 for every row m of M."""

    n: int
    M: IntMat

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]]) -> TorusSubgroup:
        if not rows:
            return cls(n, IntMat.zero(0, n))
        m = IntMat.from_rows(rows, cols=n)
        h, _ = linalg.hermite_normal_form(m)
        nz = [h.row(i) for i in range(h.rows) if any(h.row(i))]
        return cls(n, IntMat.from_rows(nz, cols=n))

    @property
    def rank(self) -> int:
        return linalg.int_rank(self.M) if self.M.rows else 0

    @property
    def dim(self) -> int:
        return self.n - self.rank

    def binomials(self, ctx: VarContext, names: Sequence[str] | None = None) -> list[RatPoly]:
        names = names or mult_names(ctx)[: self.n]
        return [monomial_binomial(ctx, self.M.row(i), names) for i in range(self.M.rows)]

    def contains_point(self, point: Sequence[Fraction]) -> bool:
        for i in range(self.M.rows):
            v = Fraction(1)
            for b, k in zip(point, self.M.row(i)):
                v *= Fraction(b) ** k
            if v != 1:
                return False
        return True

    def describe(self) -> str:
        parts = []
        for i in range(self.M.rows):
            row = self.M.row(i)
            pos = "*".join(_pw(j, k) for j, k in enumerate(row) if k > 0) or "1"
            neg = "*".join(_pw(j, -k) for j, k in enumerate(row) if k < 0) or "1"
            parts.append(f"{pos} = {neg}")
        return ", ".join(parts) if parts else "G_m^%d" % self.n


def _pw(j, k):
    return f"y{j + 1}" if k == 1 else f"y{j + 1}^{k}"


def subgroup_dim(H: TorusSubgroup) -> int:
    return H.dim


def subgroup_depth(H: TorusSubgroup, cap: int) -> int | None:
    """Least N <= cap such that H lies in a codimension-1 subgroup y^m = 1 with
    max|m_i| <= N; None when no such N exists up to ``cap``.

    H lies in {y^m = 1} exactly when m is in the row lattice of M.
    """
    if H.rank < 1:
        raise TorusError("depth is defined only for proper subgroups")
    for N in range(1, cap + 1):
        for v in linalg.integer_vectors(H.n, N):
            if max(abs(x) for x in v) != N:
                continue
            if linalg.solve_integer(H.M, v) is not None:
                return N
    return None


# ---------------------------------------------------------------- varieties

class MultVariety:
    """A subvariety of G_m^n given by an ideal in y1..yn (plus optional
    parameters), saturated at y1*...*yn on construction."""

    def __init__(self, n: int, gens: Iterable[RatPoly] = (), ctx: VarContext | None = None,
                 note: str | None = None, _saturated: bool = False):
        ctx = ctx or torus_context(n)
        if len(mult_names(ctx)) != n:
            raise TorusError(f"context must have {n} multiplicative variables")
        self.n = n
        self.ctx = ctx
        ideal = IdealBasis(ctx, gens)
        if not _saturated:
            ideal = saturate(ideal, product_of(ctx, mult_names(ctx)))
        self.ideal = ideal
        self.note = note
        self._dim: int | None = None

    @classmethod
    def full(cls, n: int) -> MultVariety:
        return cls(n, (), _saturated=True)

    @classmethod
    def point(cls, values: Sequence[Fraction | int]) -> MultVariety:
        ctx = torus_context(len(values))
        gens = [RatPoly.var(ctx, f"y{i + 1}") - Fraction(v) for i, v in enumerate(values)]
        return cls(len(values), gens, ctx)

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = dimension(self.ideal)
        return self._dim

    def is_empty(self) -> bool:
        return self.dim == EMPTY_DIM

    def generators(self) -> list[RatPoly]:
        return self.ideal.reduced().gens

    def __repr__(self):
        return f"MultVariety(n={self.n}, [{', '.join(str(g) for g in self.generators())}])"


def monomial_image(W: MultVariety, M: IntMat) -> MultVariety:
    """Zariski closure of {y^M : y in W} in G_m^r (rows of M act)."""
    if M.cols != W.n:
        raise TorusError("matrix column count must equal the torus dimension")
    ys = mult_names(W.ctx)
    zs = []
    ctx = W.ctx
    for j in range(M.rows):
        z = fresh_name(ctx, f"_z{j + 1}")
        zs.append(z)
        ctx = ctx.extend([z], "auxiliary")
    gens = [g.embed(ctx) for g in W.ideal.gens]
    for j, z in enumerate(zs):
        gens.append(monomial_binomial(ctx, M.row(j), ys, lhs=RatPoly.var(ctx, z)))
    big = saturate(IdealBasis(ctx, gens), product_of(ctx, ys))
    img = eliminate(big, ys)
    params = param_names(W.ctx)
    out_ctx = torus_context(M.rows, params)
    rename = {z: f"y{j + 1}" for j, z in enumerate(zs)}
    return MultVariety(M.rows, [g.embed(out_ctx, rename) for g in img.gens], out_ctx,
                       note=f"image under {M}")


def intersect_subgroup(W: MultVariety, H: TorusSubgroup) -> MultVariety:
    if H.n != W.n:
        raise TorusError("subgroup and variety live in different tori")
    gens = list(W.ideal.gens) + H.binomials(W.ctx)
    return MultVariety(W.n, gens, W.ctx, note=f"intersection with {H.describe()}")


def intersect_coset(W: MultVariety, H: TorusSubgroup, values: Sequence[RatPoly]) -> MultVariety:
    """W intersected with the coset {y^(m_j) = c_j}; c_j are polynomials in
    parameter variables of W's context."""
    gens = list(W.ideal.gens)
    ys = mult_names(W.ctx)
    for j in range(H.M.rows):
        gens.append(monomial_binomial(W.ctx, H.M.row(j), ys, lhs=values[j]))
    return MultVariety(W.n, gens, W.ctx)


# ---------------------------------------------------------------- atypicality

@dataclass
class AtypicalWitness:
    subgroup: TorusSubgroup
    dim_W: int
    dim_H: int
    dim_X: int

    def recheck(self, n: int) -> bool:
        return self.dim_X > self.dim_W + self.dim_H - n

    def to_json(self) -> dict:
        return {
            "subgroup": self.subgroup.M.to_rows(),
            "subgroup_text": self.subgroup.describe(),
            "dim_W": self.dim_W,
            "dim_H": self.dim_H,
            "dim_intersection": self.dim_X,
        }


@dataclass
class AtypicalityReport:
    n: int
    searched_depth: int
    dim_W: int
    witnesses: list[AtypicalWitness] = field(default_factory=list)
    checked: int = 0
    complete: bool = True
    # reserved for a per-component refinement; the test is on whole intersections
    components: None = None

    @property
    def verdict(self) -> str:
        return "witnesses-found" if self.witnesses else "none-up-to-depth"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "searched_depth": self.searched_depth,
            "n": self.n,
            "dim_W": self.dim_W,
            "subgroups_checked": self.checked,
            "complete": self.complete,
            "witnesses": [w.to_json() for w in self.witnesses],
            "method": "whole-intersection dimension (not per component)",
            "components": self.components,
        }


def atypical_witness(W: MultVariety, depth: int) -> AtypicalityReport:
    """Record every connected subgroup H spanned by relations of height <= depth
    with dim(W n H) > dim W + dim H - n."""
    if W.is_empty():
        raise TorusError("atypicality search needs a nonempty variety")
    report = AtypicalityReport(W.n, depth, W.dim)
    try:
        for M in linalg.enumerate_canonical_matrices(W.n, 1, depth):
            H = TorusSubgroup(W.n, M)
            X = intersect_subgroup(W, H)
            report.checked += 1
            if X.is_empty():
                continue
            w = AtypicalWitness(H, W.dim, H.dim, X.dim)
            if w.recheck(W.n):
                report.witnesses.append(w)
    except GroebnerBudgetError as e:
        report.complete = False
        e.partial = report
        raise
    return report


# ---------------------------------------------------------------- projections

def project_to_torus(V) -> MultVariety:
    """pr: G^n -> G_m^n on a GVariety-like object (``n`` and ``ideal``)."""
    ctx = V.ideal.ctx
    img = eliminate(V.ideal, ctx.with_role("additive"))
    out_ctx = torus_context(V.n, param_names(ctx))
    return MultVariety(V.n, [g.embed(out_ctx) for g in img.gens], out_ctx, note="projection")


def point_on(ideal: IdealBasis, point: Mapping[str, Fraction | int]) -> bool:
    missing = [n for n in ideal.ctx.names if n not in point]
    if missing:
        raise TorusError(f"point lacks coordinates for {', '.join(missing)}")
    return all(g.evaluate(point) == 0 for g in ideal.gens)


def in_generic_fibre(V, point: Mapping[str, Fraction | int]) -> bool:
    """Whether the fibre of pr through ``point`` has the generic dimension
    dim V - dim pr(V)."""
    if not point_on(V.ideal, point):
        raise TorusError("point-not-on-variety")
    ctx = V.ideal.ctx
    ys = ctx.with_role("multiplicative")
    fibre = V.ideal.plus([RatPoly.var(ctx, y) - Fraction(point[y]) for y in ys])
    generic = dimension(V.ideal) - project_to_torus(V).dim
    return dimension(fibre) == generic
