"""Sparse multivariate polynomials over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

ROLES = ("additive", "multiplicative", "auxiliary", "parameter")

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class VarContext:
    """An ordered list of variable names, each tagged with a role."""

    names: tuple[str, ...]
    roles: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if len(self.roles) != len(self.names):
            raise ValueError("one role per variable")
        for r in self.roles:
            if r not in ROLES:
                raise ValueError(f"unknown role {r!r}")

    @classmethod
    def of(cls, names: Iterable[str], role: str = "auxiliary") -> VarContext:
        names = tuple(names)
        return cls(names, (role,) * len(names))

    @classmethod
    def g_coordinates(cls, n: int, params: Sequence[str] = ()) -> VarContext:
        """x1..xn (additive), y1..yn (multiplicative), then parameters."""
        names = tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))
        roles = ("additive",) * n + ("multiplicative",) * n
        return cls(names + tuple(params), roles + ("parameter",) * len(params))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except AttributeError:
            object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})
            return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def with_role(self, role: str) -> tuple[str, ...]:
        return tuple(n for n, r in zip(self.names, self.roles) if r == role)

    def extend(self, names: Iterable[str], role: str = "auxiliary") -> VarContext:
        names = tuple(names)
        return VarContext(self.names + names, self.roles + (role,) * len(names))

    def restrict(self, keep: Iterable[str]) -> VarContext:
        keep = set(keep)
        pairs = [(n, r) for n, r in zip(self.names, self.roles) if n in keep]
        return VarContext(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def role_of(self, name: str) -> str:
        return self.roles[self.index(name)]


class RatPoly:
    """Immutable sparse polynomial: a dict from exponent tuples to nonzero Fractions."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            n = ctx.nvars
            for m, c in terms.items():
                if len(m) != n:
                    raise ValueError("exponent vector length does not match the context")
                c = Fraction(c)
                if c:
                    clean[tuple(m)] = c
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx: VarContext, terms: dict) -> RatPoly:
        p = object.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, ctx: VarContext, c: Fraction | int) -> RatPoly:
        return cls(ctx, {(0,) * ctx.nvars: c})

    @classmethod
    def var(cls, ctx: VarContext, name: str) -> RatPoly:
        e = [0] * ctx.nvars
        e[ctx.index(name)] = 1
        return cls._raw(ctx, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, ctx: VarContext, exps: Mapping[str, int], coeff: Fraction | int = 1) -> RatPoly:
        e = [0] * ctx.nvars
        for name, k in exps.items():
            if k < 0:
                raise ValueError("negative exponent")
            e[ctx.index(name)] += k
        return cls(ctx, {tuple(e): coeff})

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.ctx.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def support(self) -> set[str]:
        used = set()
        for m in self.terms:
            for i, k in enumerate(m):
                if k:
                    used.add(self.ctx.names[i])
        return used

    def degree_in(self, name: str) -> int:
        i = self.ctx.index(name)
        return max((m[i] for m in self.terms), default=-1)

    # arithmetic
    def _coerce(self, other) -> RatPoly:
        if isinstance(other, RatPoly):
            if other.ctx != self.ctx:
                raise ValueError("polynomials live in different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return RatPoly.const(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return RatPoly._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return RatPoly._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return RatPoly._raw(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = RatPoly.const(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: Fraction | int) -> RatPoly:
        c = Fraction(c)
        if not c:
            return RatPoly._raw(self.ctx, {})
        return RatPoly._raw(self.ctx, {m: v * c for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other and (other != 0 or not self.terms)
        if not isinstance(other, RatPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    # calculus / substitution
    def diff(self, name: str) -> RatPoly:
        i = self.ctx.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return RatPoly._raw(self.ctx, out)

    def evaluate(self, values: Mapping[str, Fraction | int]) -> Fraction:
        """Numeric evaluation at a rational point (all variables must be given)."""
        vals = [Fraction(values[n]) for n in self.ctx.names]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, k in zip(vals, m):
                if k:
                    t *= v ** k
            total += t
        return total

    def substitute(self, images: Mapping[str, RatPoly], target: VarContext) -> RatPoly:
        """Ring map into ``target``: named variables go to the given images, the
        rest go to the same-named variable of ``target``."""
        gens = []
        for n in self.ctx.names:
            if n in images:
                img = images[n]
                if img.ctx != target:
                    raise ValueError(f"image of {n} lives in the wrong context")
                gens.append(img)
            else:
                gens.append(RatPoly.var(target, n))
        out = RatPoly._raw(target, {})
        powcache: dict = {}
        for m, c in self.terms.items():
            t = RatPoly.const(target, c)
            for i, k in enumerate(m):
                if k:
                    key = (i, k)
                    if key not in powcache:
                        powcache[key] = gens[i] ** k
                    t = t * powcache[key]
            out = out + t
        return out

    def embed(self, target: VarContext, rename: Mapping[str, str] | None = None) -> RatPoly:
        """Re-express in a context that contains (renamed) copies of the used variables."""
        rename = rename or {}
        idx = [target.index(rename.get(n, n)) if k else None
               for n, k in zip(self.ctx.names, self._used_mask())]
        out = {}
        for m, c in self.terms.items():
            e = [0] * target.nvars
            for i, k in enumerate(m):
                if k:
                    e[idx[i]] += k
            out[tuple(e)] = c
        return RatPoly._raw(target, out)

    def _used_mask(self) -> list[bool]:
        mask = [False] * self.ctx.nvars
        for m in self.terms:
            for i, k in enumerate(m):
                if k:
                    mask[i] = True
        return mask

    def __repr__(self):
        return f"RatPoly({str(self)!r})"

    def __str__(self):
        from .parse import format_poly

        return format_poly(self)


def ctx_union(*ctxs: VarContext) -> VarContext:
    names: list[str] = []
    roles: list[str] = []
    for c in ctxs:
        for n, r in zip(c.names, c.roles):
            if n not in names:
                names.append(n)
                roles.append(r)
    return VarContext(tuple(names), tuple(roles))


def monomial_binomial(ctx: VarContext, exps: Sequence[int], names: Sequence[str],
                      lhs: RatPoly | None = None) -> RatPoly:
    """For an integer exponent vector m over ``names``, return lhs*y^(m-) - y^(m+).

    With lhs = None this is the binomial y^(m+) - y^(m-) cutting out y^m = 1.
    """
    pos = {n: k for n, k in zip(names, exps) if k > 0}
    neg = {n: -k for n, k in zip(names, exps) if k < 0}
    if lhs is None:
        return RatPoly.monomial(ctx, pos) - RatPoly.monomial(ctx, neg)
    return lhs * RatPoly.monomial(ctx, neg) - RatPoly.monomial(ctx, pos)
