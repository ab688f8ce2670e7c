"""Buchberger's algorithm over Q and the ideal-theoretic operations built on it.

Polynomials are handled internally as plain dicts {exponent tuple: Fraction};
RatPoly is only the public wrapper. Monomial orders are given by integer-tuple
sort keys so that a max-heap can be simulated by negating the key.
"""

from __future__ import annotations

import contextvars
import heapq
import itertools
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .. import linalg
from .ring import RatPoly, VarContext

EMPTY_DIM = -1

# field widths for integer order keys: per exponent, and per block degree
_KEYW = 16
_DEGW = 24


# ---------------------------------------------------------------- orders

@dataclass(frozen=True)
class MonomialOrder:
    """``kind`` is 'grevlex', 'lex' or 'block'.

    A block order compares the blocks in sequence, each by grevlex restricted
    to its variable indices; the first block is the most significant.
    """

    kind: str = "grevlex"
    blocks: tuple[tuple[int, ...], ...] = ()

    def key_function(self, nvars: int):
        """Map an exponent tuple to an int whose natural order is this order."""
        w = _KEYW
        top = (1 << w) - 1
        if self.kind == "grevlex":
            hi = w * nvars
            return lambda m: (sum(m) << hi) | sum((top - e) << (w * i) for i, e in enumerate(m))
        if self.kind == "lex":
            return lambda m: sum(e << (w * (nvars - 1 - i)) for i, e in enumerate(m))
        if self.kind == "block":
            layout = []
            offset = 0
            for b in reversed(self.blocks):
                layout.append((b, offset))
                offset += w * len(b) + _DEGW
            layout.reverse()

            def key(m):
                v = 0
                for b, off in layout:
                    v |= sum(m[i] for i in b) << (off + w * len(b))
                    for pos, i in enumerate(b):
                        v |= (top - m[i]) << (off + w * pos)
                return v
            return key
        raise ValueError(f"unknown monomial order {self.kind!r}")

    def tag(self, ctx: VarContext | None = None) -> str:
        if self.kind != "block":
            return self.kind
        if ctx is None:
            return "block" + repr(self.blocks)
        return "block(" + " >> ".join(",".join(ctx.names[i] for i in b) for b in self.blocks) + ")"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(ctx: VarContext, *groups: Iterable[str]) -> MonomialOrder:
    """Block order on ``groups`` (most significant first); unnamed variables
    form a final block."""
    seen: list[int] = []
    blocks = []
    for g in groups:
        idx = tuple(sorted(ctx.index(n) for n in g))
        if idx:
            blocks.append(idx)
            seen.extend(idx)
    rest = tuple(i for i in range(ctx.nvars) if i not in set(seen))
    if rest:
        blocks.append(rest)
    return MonomialOrder("block", tuple(blocks))


def elimination_order(ctx: VarContext, drop: Iterable[str]) -> MonomialOrder:
    return block_order(ctx, drop)


# ---------------------------------------------------------------- budgets

class GroebnerBudgetError(RuntimeError):
    """Raised when a Groebner computation exceeds the configured budget."""

    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = dict(stats)


@dataclass(frozen=True)
class Budget:
    max_degree: int | None = None
    max_terms: int | None = None


_BUDGET: contextvars.ContextVar[Budget] = contextvars.ContextVar("groebner_budget", default=Budget())


@contextmanager
def budget(max_degree: int | None = None, max_terms: int | None = None):
    token = _BUDGET.set(Budget(max_degree, max_terms))
    try:
        yield
    finally:
        _BUDGET.reset(token)


def current_budget() -> Budget:
    return _BUDGET.get()


# ---------------------------------------------------------------- core
#
# Inside the engine a monomial is a single int holding the exponents in
# fixed-width fields (FIELD bits each, the top bit of each field a guard bit
# that stays clear), so that multiplication is integer addition and
# divisibility is one subtraction. Coefficients are gmpy2 rationals.

FIELD = 16
_MAXEXP = (1 << (FIELD - 1)) - 1


class _Engine:
    def __init__(self, nvars: int, order: MonomialOrder):
        self.n = nvars
        self.order = order
        self.tkey = order.key_function(nvars)
        self.shifts = [FIELD * i for i in range(nvars)]
        self.guard = sum(1 << (s + FIELD - 1) for s in self.shifts)
        self.fmask = (1 << FIELD) - 1
        self._kc: dict = {}
        self.stats = {"pairs": 0, "zero_reductions": 0, "basis_size": 0, "max_degree": 0, "max_terms": 0}
        self.limits = current_budget()

    # packing
    def pack(self, m) -> int:
        v = 0
        for e, s in zip(m, self.shifts):
            if e > _MAXEXP:
                raise OverflowError(f"exponent {e} too large")
            v |= e << s
        return v

    def unpack(self, v: int) -> tuple[int, ...]:
        f = self.fmask
        return tuple((v >> s) & f for s in self.shifts)

    def pack_poly(self, terms) -> dict:
        return {self.pack(m): mpq(c.numerator, c.denominator) for m, c in terms.items()}

    def unpack_poly(self, p: dict) -> dict:
        return {self.unpack(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in p.items()}

    def k(self, m: int):
        v = self._kc.get(m)
        if v is None:
            v = self._kc[m] = self.tkey(self.unpack(m))
        return v

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        f = self.fmask
        v = 0
        for s in self.shifts:
            x, y = (a >> s) & f, (b >> s) & f
            v |= (x if x > y else y) << s
        return v

    def disjoint(self, a: int, b: int) -> bool:
        f = self.fmask
        for s in self.shifts:
            if (a >> s) & f and (b >> s) & f:
                return False
        return True

    def degree(self, m: int) -> int:
        f = self.fmask
        return sum((m >> s) & f for s in self.shifts)

    def lead(self, p: dict) -> int:
        return max(p, key=self.k)

    def monic(self, p: dict) -> dict:
        c = p[self.lead(p)]
        if c == 1:
            return p
        inv = 1 / c
        return {m: v * inv for m, v in p.items()}

    def check(self, p: dict):
        lim = self.limits
        deg = max(self.degree(m) for m in p)
        st = self.stats
        if deg > st["max_degree"]:
            st["max_degree"] = deg
        if len(p) > st["max_terms"]:
            st["max_terms"] = len(p)
        if lim.max_degree is not None and deg > lim.max_degree:
            raise GroebnerBudgetError(f"degree budget {lim.max_degree} exceeded (degree {deg})", st)
        if lim.max_terms is not None and len(p) > lim.max_terms:
            raise GroebnerBudgetError(f"term budget {lim.max_terms} exceeded ({len(p)} terms)", st)

    def reduce(self, p: dict, basis: Sequence[tuple], full: bool = True) -> dict:
        """Remainder of ``p`` on division by ``basis`` = [(lead, monic poly)]."""
        p = dict(p)
        out: dict = {}
        k = self.k
        g = self.guard
        heap = [(-k(m), m) for m in p]
        heapq.heapify(heap)
        push, pop = heapq.heappush, heapq.heappop
        while heap:
            m = pop(heap)[1]
            c = p.get(m)
            if c is None:
                continue
            mg = m | g
            for lm, f in basis:
                if (mg - lm) & g == g:
                    q = m - lm
                    for fm, fc in f.items():
                        t = fm + q
                        old = p.get(t)
                        if old is None:
                            p[t] = -c * fc
                            push(heap, (-k(t), t))
                        else:
                            v = old - c * fc
                            if v:
                                p[t] = v
                            else:
                                del p[t]
                    p.pop(m, None)
                    break
            else:
                out[m] = c
                del p[m]
                if not full:
                    out.update(p)
                    return out
        return out

    def spoly(self, f: dict, lf: int, g: dict, lg: int) -> dict:
        l = self.lcm(lf, lg)
        qf, qg = l - lf, l - lg
        out = {m + qf: c for m, c in f.items()}
        for m, c in g.items():
            t = m + qg
            v = out.get(t, 0) - c
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        return out

    def run(self, polys: Iterable[dict]) -> list[dict]:
        polys = [p for p in polys if p]
        if not polys:
            return []
        store: list[tuple] = []  # (lead, monic poly)
        active: list[int] = []
        pairs: list[tuple] = []  # (key of lcm, i, j): normal selection strategy
        for p in sorted(polys, key=lambda p: self.k(self.lead(p))):
            self.check(p)
            r = self.reduce(p, [store[i] for i in active])
            if not r:
                continue
            r = self.monic(r)
            lm = self.lead(r)
            if lm == 0:
                return [{0: mpq(1)}]
            store.append((lm, r))
            active, pairs = self._update(store, active, pairs, len(store) - 1)
        while pairs:
            pairs.sort(reverse=True)
            _, i, j = pairs.pop()
            self.stats["pairs"] += 1
            (li, fi), (lj, fj) = store[i], store[j]
            s = self.spoly(fi, li, fj, lj)
            if not s:
                self.stats["zero_reductions"] += 1
                continue
            self.check(s)
            r = self.reduce(s, [store[a] for a in active])
            if not r:
                self.stats["zero_reductions"] += 1
                continue
            self.check(r)
            r = self.monic(r)
            lm = self.lead(r)
            if lm == 0:
                return [{0: mpq(1)}]
            store.append((lm, r))
            self.stats["basis_size"] = len(store)
            active, pairs = self._update(store, active, pairs, len(store) - 1)
        return self._interreduce([store[i] for i in active])

    def _update(self, store, active, pairs, h):
        """Gebauer-Moeller installation of a new basis element."""
        lh = store[h][0]
        div, lcm, disjoint = self.divides, self.lcm, self.disjoint
        cand = [(g, lcm(lh, store[g][0])) for g in active]
        kept = []
        for idx, (g, l) in enumerate(cand):
            if disjoint(lh, store[g][0]):
                kept.append((g, l))
                continue
            if any(div(l2, l) for _, l2 in cand[idx + 1:]) or any(div(l2, l) for _, l2 in kept):
                continue
            kept.append((g, l))
        fresh = [(self.k(l), g, h) for g, l in kept if not disjoint(lh, store[g][0])]
        old = []
        for pr in pairs:
            a, b = pr[1], pr[2]
            l = lcm(store[a][0], store[b][0])
            if div(lh, l) and lcm(store[a][0], lh) != l and lcm(store[b][0], lh) != l:
                continue
            old.append(pr)
        new_active = [g for g in active if not div(lh, store[g][0])]
        new_active.append(h)
        return new_active, old + fresh

    def _interreduce(self, basis: list[tuple]) -> list[dict]:
        basis = sorted(basis, key=lambda t: self.k(t[0]))
        minimal: list[tuple] = []
        for i, (lm, g) in enumerate(basis):
            if any(self.divides(l2, lm) for j, (l2, _) in enumerate(basis) if j != i):
                continue
            minimal.append((lm, g))
        final = []
        for i, (lm, g) in enumerate(minimal):
            others = [b for j, b in enumerate(minimal) if j != i]
            tail = {m: c for m, c in g.items() if m != lm}
            r = self.reduce(tail, others) if tail else {}
            r[lm] = mpq(1)
            final.append(r)
        final.sort(key=lambda p: self.k(self.lead(p)), reverse=True)
        return final


# ---------------------------------------------------------------- public types

class GroebnerBasis:
    """A reduced Groebner basis: monic, auto-reduced, sorted by leading monomial."""

    def __init__(self, ctx: VarContext, order: MonomialOrder, polys: Sequence[dict] = (),
                 stats: dict | None = None, *, _engine: _Engine | None = None, _packed=None):
        self.ctx = ctx
        self.order = order
        self._engine = _engine or _Engine(ctx.nvars, order)
        if _packed is None:
            _packed = [self._engine.pack_poly(p) for p in polys]
        self._packed = _packed
        self._lead_ints = [self._engine.lead(p) for p in _packed]
        self.leads = [self._engine.unpack(m) for m in self._lead_ints]
        self.stats = stats or {}
        self._polys: list[RatPoly] | None = None

    @property
    def polys(self) -> list[RatPoly]:
        if self._polys is None:
            self._polys = [RatPoly._raw(self.ctx, self._engine.unpack_poly(p)) for p in self._packed]
        return list(self._polys)

    def __len__(self):
        return len(self._packed)

    def is_unit(self) -> bool:
        return len(self._lead_ints) == 1 and self._lead_ints[0] == 0

    def is_zero(self) -> bool:
        return not self._packed

    def normal_form(self, p: RatPoly) -> RatPoly:
        if p.ctx != self.ctx:
            raise ValueError("polynomial and basis live in different contexts")
        eng = self._engine
        r = eng.reduce(eng.pack_poly(p.terms), list(zip(self._lead_ints, self._packed)))
        return RatPoly._raw(self.ctx, eng.unpack_poly(r))

    def contains(self, p: RatPoly) -> bool:
        return self.normal_form(p).is_zero()

    def leading_monomial(self, p: RatPoly):
        eng = self._engine
        return eng.unpack(eng.lead(eng.pack_poly(p.terms)))

    def is_reduced(self) -> bool:
        eng = self._engine
        for i, p in enumerate(self._packed):
            if eng.lead(p) != self._lead_ints[i] or p[self._lead_ints[i]] != 1:
                return False
            for m in p:
                for j, l2 in enumerate(self._lead_ints):
                    if j != i and eng.divides(l2, m):
                        return False
        return True

    def __repr__(self):
        return f"GroebnerBasis({self.order.tag(self.ctx)}, [{', '.join(str(p) for p in self.polys)}])"


def groebner(polys: Sequence[RatPoly], ctx: VarContext | None = None,
             order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    if ctx is None:
        if not polys:
            raise ValueError("empty generator list needs an explicit context")
        ctx = polys[0].ctx
    for p in polys:
        if p.ctx != ctx:
            raise ValueError("generators live in different contexts")
    eng = _Engine(ctx.nvars, order)
    out = eng.run([eng.pack_poly(p.terms) for p in polys])
    return GroebnerBasis(ctx, order, stats=dict(eng.stats), _engine=eng, _packed=out)


class IdealBasis:
    """Generators of an ideal with a write-once cache of Groebner bases per order."""

    def __init__(self, ctx: VarContext, gens: Iterable[RatPoly] = ()):
        self.ctx = ctx
        gs = []
        for g in gens:
            if g.ctx != ctx:
                g = g.embed(ctx)
            if not g.is_zero():
                gs.append(g)
        self.gens: tuple[RatPoly, ...] = tuple(gs)
        self._cache: dict = {}

    def groebner(self, order: MonomialOrder = GREVLEX) -> GroebnerBasis:
        gb = self._cache.get(order)
        if gb is None:
            gb = groebner(self.gens, self.ctx, order)
            self._cache.setdefault(order, gb)
        return gb

    def seed_groebner(self, gb: GroebnerBasis):
        if gb.ctx == self.ctx:
            self._cache.setdefault(gb.order, gb)

    def reduced(self) -> IdealBasis:
        """Same ideal, generated by its reduced grevlex basis."""
        gb = self.groebner()
        out = IdealBasis(self.ctx, gb.polys)
        out.seed_groebner(gb)
        return out

    def normal_form(self, p: RatPoly) -> RatPoly:
        return self.groebner().normal_form(p)

    def contains(self, p: RatPoly) -> bool:
        return self.groebner().contains(p)

    def contains_ideal(self, other: IdealBasis) -> bool:
        return all(self.contains(g.embed(self.ctx)) for g in other.gens)

    def equals(self, other: IdealBasis) -> bool:
        return self.contains_ideal(other) and other.contains_ideal(self)

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def plus(self, extra: Iterable[RatPoly]) -> IdealBasis:
        return IdealBasis(self.ctx, list(self.gens) + list(extra))

    def in_context(self, ctx: VarContext, rename=None) -> IdealBasis:
        return IdealBasis(ctx, [g.embed(ctx, rename) for g in self.gens])

    def dimension(self, ignoring: Iterable[str] = ()) -> int:
        return ideal_dimension(self, ignoring)

    def __repr__(self):
        return f"IdealBasis([{', '.join(str(g) for g in self.gens)}])"


# ---------------------------------------------------------------- dimension

def _max_independent(leads: list[tuple], candidates: list[int]) -> int:
    """Size of a largest set S of variable indices such that no lead monomial
    has its support inside S."""
    supports = [frozenset(i for i, k in enumerate(m) if k) for m in leads]
    if any(not s for s in supports):
        return EMPTY_DIM
    supports = [s & frozenset(candidates) if s <= frozenset(candidates) else None for s in supports]
    supports = [s for s in supports if s is not None]
    best = 0

    def grow(chosen: frozenset, rest: list[int]):
        nonlocal best
        if len(chosen) + len(rest) <= best:
            return
        if not rest:
            best = len(chosen)
            return
        v, tail = rest[0], rest[1:]
        with_v = chosen | {v}
        if not any(s <= with_v for s in supports):
            grow(with_v, tail)
        grow(chosen, tail)

    grow(frozenset(), list(candidates))
    return best


def ideal_dimension(I, ignoring: Iterable[str] = ()) -> int:
    """Krull dimension of Q[vars]/I, or EMPTY_DIM (-1) for the unit ideal.

    Variables in ``ignoring`` are treated as parameters: the dimension is that
    of the extended ideal over the rational function field Q(params).
    """
    if isinstance(I, GroebnerBasis):
        ctx = I.ctx
        ideal = IdealBasis(ctx, I.polys)
        ideal.seed_groebner(I)
    else:
        ctx = I.ctx
        ideal = I
    params = [n for n in dict.fromkeys(ignoring) if n in ctx]
    if not params:
        gb = ideal.groebner(GREVLEX)
        return _max_independent(gb.leads, list(range(ctx.nvars)))
    others = [n for n in ctx.names if n not in params]
    gb = ideal.groebner(block_order(ctx, others, params))
    pidx = {ctx.index(n) for n in params}
    xidx = [ctx.index(n) for n in others]
    leads = []
    for lm in gb.leads:
        xs = tuple(0 if i in pidx else k for i, k in enumerate(lm))
        if not any(xs):
            return EMPTY_DIM
        leads.append(xs)
    return _max_independent(leads, xidx)


# ---------------------------------------------------------------- elimination

def eliminate(I: IdealBasis, drop: Iterable[str]) -> IdealBasis:
    """I intersected with the subring of the variables not in ``drop``."""
    drop = [n for n in dict.fromkeys(drop) if n in I.ctx]
    keep_ctx = I.ctx.restrict([n for n in I.ctx.names if n not in set(drop)])
    if not drop:
        return IdealBasis(keep_ctx, I.gens)
    gb = I.groebner(elimination_order(I.ctx, drop))
    didx = [I.ctx.index(n) for n in drop]
    out = []
    for p in gb.polys:
        if all(not m[i] for m in p.terms for i in didx):
            out.append(p.embed(keep_ctx))
    res = IdealBasis(keep_ctx, out)
    # the kept elements form the reduced basis of the elimination ideal for
    # the second block's order, which is grevlex on the kept variables
    kept = GroebnerBasis(keep_ctx, GREVLEX, [p.terms for p in out])
    if kept.is_reduced():
        res.seed_groebner(kept)
    return res


def fresh_name(ctx: VarContext, base: str) -> str:
    if base not in ctx:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in ctx:
            return cand
    raise AssertionError


def saturate(I: IdealBasis, f: RatPoly) -> IdealBasis:
    """I : f^infinity via an auxiliary t with t*f - 1."""
    if f.ctx != I.ctx:
        f = f.embed(I.ctx)
    if f.is_zero():
        return IdealBasis(I.ctx, [RatPoly.const(I.ctx, 1)])
    if f.is_constant():
        return IdealBasis(I.ctx, I.gens)
    t = fresh_name(I.ctx, "_t")
    big = I.ctx.extend([t], "auxiliary")
    gens = [g.embed(big) for g in I.gens]
    gens.append(RatPoly.var(big, t) * f.embed(big) - 1)
    out = eliminate(IdealBasis(big, gens), [t])
    return IdealBasis(I.ctx, [g.embed(I.ctx) for g in out.gens]) if out.ctx != I.ctx else out


# ---------------------------------------------------------------- linear relations

def affine_linear_relations(I, elems: Sequence[RatPoly]) -> list[tuple[int, ...]]:
    """Primitive integer basis of {(c_1..c_k, c_0) : sum c_i*e_i + c_0 in I}."""
    gb = I.groebner() if isinstance(I, IdealBasis) else I
    items = list(elems) + [RatPoly.const(gb.ctx, 1)]
    nfs = [gb.normal_form(e) for e in items]
    monos = sorted({m for p in nfs for m in p.terms})
    vecs = [[p.terms.get(m, Fraction(0)) for m in monos] for p in nfs]
    return linalg.q_linear_relations(vecs)


def linear_relations(I, elems: Sequence[RatPoly]) -> list[tuple[int, ...]]:
    """Primitive integer basis of {c : sum c_i*e_i in I}."""
    gb = I.groebner() if isinstance(I, IdealBasis) else I
    nfs = [gb.normal_form(e) for e in elems]
    monos = sorted({m for p in nfs for m in p.terms})
    vecs = [[p.terms.get(m, Fraction(0)) for m in monos] for p in nfs]
    return linalg.q_linear_relations(vecs)
