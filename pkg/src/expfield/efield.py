"""Finitely presented partial exponential fields.

A presentation is a field Q(gens)/relations together with a Q-subspace
D spanned by finitely many field elements, and an exponential declared on the
lattice spanned by finitely many pairs (d, e^d). Everything universal about an
E-field (strongness, semistrongness, Schanuel-type bounds) becomes a check over
finitely many probe tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from . import linalg
from .linalg import IntMat
from .poly import EMPTY_DIM, IdealBasis, RatPoly, VarContext, eliminate, format_poly, fresh_name, parse_poly, saturate

#: default depth of the root-of-unity tower
DEFAULT_LEVEL = 12


class EFieldError(ValueError):
    pass


class PurityError(EFieldError):
    pass


class KernelMismatchError(EFieldError):
    pass


class RootConflictError(EFieldError):
    pass


Quot = tuple  # (num, den) pair of RatPoly


def _primes_dividing(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def _prime_power(m: int) -> tuple[int, int] | None:
    ps = _primes_dividing(m)
    if len(ps) != 1:
        return None
    p, k = ps[0], 0
    while m > 1:
        m //= p
        k += 1
    return p, k


def _cyclotomic_prime(z: RatPoly, p: int) -> RatPoly:
    out = RatPoly.const(z.ctx, 0)
    for i in range(p):
        out = out + z ** i
    return out


def zeta_name(m: int) -> str:
    return f"zeta{m}"


@dataclass(frozen=True)
class ExpPair:
    element: RatPoly
    value: RatPoly


@dataclass(frozen=True)
class ElementTuple:
    """A tuple of field elements; ``d_coords`` optionally gives the
    coordinates of each entry against the dspan basis (None for entries
    outside D)."""

    elements: tuple
    d_coords: tuple | None = None

    def __len__(self):
        return len(self.elements)

    def __add__(self, other: ElementTuple) -> ElementTuple:
        if self.d_coords is None or other.d_coords is None:
            return ElementTuple(self.elements + other.elements)
        return ElementTuple(self.elements + other.elements, self.d_coords + other.d_coords)


@dataclass(frozen=True)
class SubPresentation:
    """The partial E-subfield generated by ``field`` (field elements) and
    ``d`` (elements of D, whose exponentials are included)."""

    field: tuple = ()
    d: tuple = ()

    def joined(self, F: EFieldPresentation, t: ElementTuple) -> SubPresentation:
        items = F.resolve(t)
        return SubPresentation(self.field + tuple(e for e, _ in items),
                               self.d + tuple(e for e, c in items if c is not None))


@dataclass
class CoherentRootSystem:
    """c_1 = target and c_(rm)^r = c_m for rm <= level; ``symbols`` and
    ``relations`` are what must be adjoined to realise the values."""

    level: int
    target: RatPoly
    values: dict
    ctx: VarContext
    symbols: list = field(default_factory=list)
    relations: list = field(default_factory=list)

    def check(self, ideal: IdealBasis) -> bool:
        if self.values[1] != self.target:
            return False
        for m in range(2, self.level + 1):
            for p in _primes_dividing(m):
                if not ideal.contains(self.values[m] ** p - self.values[m // p]):
                    return False
        return True


class EFieldPresentation:
    """Immutable; operations return new presentations."""

    def __init__(self, gens: Sequence[str], relations: Iterable[RatPoly] = (),
                 dspan: Iterable[RatPoly] = (), pairs: Iterable[ExpPair] = (),
                 kernel: Iterable[int] = (), tau: int | None = None,
                 roots: Mapping[int, str] | None = None, root_level: int = 0,
                 stabilizer: Iterable[RatPoly] = (), check: bool = True):
        self.ctx = VarContext.of(gens, "auxiliary")
        self.gens = tuple(gens)
        self.relations = tuple(r.embed(self.ctx) for r in relations)
        self.ideal = IdealBasis(self.ctx, self.relations)
        self.dspan = tuple(d.embed(self.ctx) for d in dspan)
        self.pairs = tuple(ExpPair(p.element.embed(self.ctx), p.value.embed(self.ctx)) for p in pairs)
        self.kernel = tuple(sorted(set(kernel)))
        self.tau = tau
        self.roots = dict(sorted((roots or {}).items()))
        self.root_level = root_level
        self.stabilizer = tuple(s.embed(self.ctx) for s in stabilizer)
        self._td_cache: dict = {}
        self._lattice = None
        if self.ideal.is_unit():
            raise EFieldError("relations generate the unit ideal")
        self._dvecs, self._dmonos = self._nf_basis()
        if check:
            problems = self.violations()
            if problems:
                raise EFieldError("; ".join(problems))
        self.pair_coords = tuple(self.coordinates(p.element) for p in self.pairs)

    # ------------------------------------------------------------ basics

    def element(self, text: str) -> RatPoly:
        return parse_poly(text, self.ctx)

    def var(self, name: str) -> RatPoly:
        return RatPoly.var(self.ctx, name)

    def tuple(self, *items) -> ElementTuple:
        return ElementTuple(tuple(self.element(x) if isinstance(x, str) else x.embed(self.ctx) for x in items))

    def normal(self, p: RatPoly) -> RatPoly:
        return self.ideal.normal_form(p.embed(self.ctx))

    def is_zero(self, p: RatPoly) -> bool:
        return self.ideal.contains(p.embed(self.ctx))

    def _nf_basis(self):
        nfs = [self.ideal.normal_form(d) for d in self.dspan]
        monos = sorted({m for p in nfs for m in p.terms})
        return [[p.terms.get(m, Fraction(0)) for m in monos] for p in nfs], monos

    def coordinates(self, elem: RatPoly) -> tuple | None:
        """Coordinates of elem against the dspan basis, or None if elem is
        not in D."""
        nf = self.ideal.normal_form(elem.embed(self.ctx))
        if any(m not in set(self._dmonos) for m in nf.terms):
            return None
        target = [nf.terms.get(m, Fraction(0)) for m in self._dmonos]
        c = linalg.solve_rational(self._dvecs, target)
        return None if c is None else tuple(c)

    def d_element(self, coords: Sequence[Fraction]) -> RatPoly:
        out = RatPoly.const(self.ctx, 0)
        for c, d in zip(coords, self.dspan):
            if c:
                out = out + d.scale(c)
        return out

    def resolve(self, t: ElementTuple) -> list[tuple[RatPoly, tuple | None]]:
        elems = [e.embed(self.ctx) for e in t.elements]
        if t.d_coords is not None:
            coords = [tuple(Fraction(x) for x in c) if c is not None else None for c in t.d_coords]
            for e, c in zip(elems, coords):
                if c is not None and not self.is_zero(e - self.d_element(c)):
                    raise EFieldError(f"declared D-coordinates do not evaluate to {e}")
        else:
            coords = [self.coordinates(e) for e in elems]
        return list(zip(elems, coords))

    # ------------------------------------------------------------ kernel

    def kernel_indices(self) -> list[int]:
        one = RatPoly.const(self.ctx, 1)
        return sorted(set(self.kernel) | {i for i, p in enumerate(self.pairs) if p.value == one})

    def kernel_elements(self) -> list[RatPoly]:
        return [self.pairs[i].element for i in self.kernel_indices()]

    def tau_element(self) -> RatPoly:
        if self.tau is None:
            raise EFieldError("no kernel generator tau is marked")
        return self.pairs[self.tau].element

    # ------------------------------------------------------------ exponential

    def _lattice_data(self):
        """Integer basis of the pair lattice (scaled by a common denominator)
        with the exponent vectors expressing each basis row in the pairs."""
        if self._lattice is None:
            coords = [c for c in self.pair_coords]
            den = 1
            for c in coords:
                for x in c:
                    den = lcm(den, x.denominator)
            k = len(self.dspan)
            if not coords:
                self._lattice = (den, [], [])
            else:
                A = IntMat.from_rows([[int(x * den) for x in c] for c in coords], cols=k)
                H, U = linalg.hermite_normal_form(A)
                basis, combos = [], []
                for i in range(H.rows):
                    if any(H.row(i)):
                        basis.append(H.row(i))
                        combos.append(U.row(i))
                self._lattice = (den, basis, combos)
        return self._lattice

    def _product(self, exps: Sequence[int]) -> Quot:
        num = RatPoly.const(self.ctx, 1)
        den = RatPoly.const(self.ctx, 1)
        for p, e in zip(self.pairs, exps):
            if e > 0:
                num = num * p.value ** e
            elif e < 0:
                den = den * p.value ** (-e)
        return self.ideal.normal_form(num), self.ideal.normal_form(den)

    def exp_power(self, coords: Sequence[Fraction]) -> tuple[int, Quot]:
        """(k, e^(k d)) for the least k >= 1 with k d in the declared lattice."""
        den, basis, combos = self._lattice_data()
        target = [Fraction(x) * den for x in coords]
        lam = linalg.solve_rational(basis, target) if basis else (
            [] if not any(target) else None)
        if lam is None:
            raise EFieldError("element outside the declared exp graph")
        k = 1
        for x in lam:
            k = lcm(k, x.denominator)
        exps = [0] * len(self.pairs)
        for l, combo in zip(lam, combos):
            for j, u in enumerate(combo):
                exps[j] += int(l * k) * u
        return k, self._product(exps)

    def exp_of(self, coords: Sequence[Fraction]) -> Quot | None:
        k, val = self.exp_power(coords)
        return val if k == 1 else None

    # ------------------------------------------------------------ td

    def td(self, elems: Iterable) -> int:
        """Transcendence degree over Q of the given field elements (RatPoly or
        (num, den) pairs)."""
        items = []
        for e in elems:
            num, den = (e, RatPoly.const(self.ctx, 1)) if isinstance(e, RatPoly) else e
            items.append((num.embed(self.ctx), den.embed(self.ctx)))
        key = frozenset((str(n), str(d)) for n, d in items)
        if key in self._td_cache:
            return self._td_cache[key]
        ctx = self.ctx
        keep, extra, dens = set(), [], []
        for num, den in items:
            if den.is_constant():
                p = num.scale(1 / den.constant_value())
                if p.is_constant():
                    continue
                if len(p.terms) == 1 and p.total_degree() == 1 and next(iter(p.terms.values())) == 1:
                    keep.add(next(iter(p.support())))
                    continue
                t = fresh_name(ctx, "_t")
                ctx = ctx.extend([t], "auxiliary")
                extra.append((t, p, None))
            else:
                t = fresh_name(ctx, "_t")
                ctx = ctx.extend([t], "auxiliary")
                extra.append((t, num, den))
                dens.append(den)
            keep.add(t)
        gens = [g.embed(ctx) for g in self.ideal.gens]
        for t, num, den in extra:
            tv = RatPoly.var(ctx, t)
            gens.append(tv - num.embed(ctx) if den is None else tv * den.embed(ctx) - num.embed(ctx))
        J = IdealBasis(ctx, gens)
        if dens:
            prod = RatPoly.const(ctx, 1)
            for d in dens:
                prod = prod * d.embed(ctx)
            J = saturate(J, prod)
        drop = [n for n in ctx.names if n not in keep]
        dim = eliminate(J, drop).dimension() if drop else J.dimension()
        if dim == EMPTY_DIM:
            raise EFieldError("relations generate the unit ideal")
        self._td_cache[key] = dim
        return dim

    def base_elements(self, X: SubPresentation) -> list:
        out = [e.embed(self.ctx) for e in X.field]
        for d in X.d:
            d = d.embed(self.ctx)
            c = self.coordinates(d)
            if c is None:
                raise EFieldError(f"{d} is not in D")
            out.append(d)
            out.append(self.exp_power(c)[1])
        return out

    def base_coords(self, X: SubPresentation) -> list[tuple]:
        out = []
        for d in X.d:
            c = self.coordinates(d.embed(self.ctx))
            if c is None:
                raise EFieldError(f"{d} is not in D")
            out.append(c)
        return out

    # ------------------------------------------------------------ bases

    def whole(self) -> SubPresentation:
        return SubPresentation(tuple(self.var(g) for g in self.gens), self.dspan)

    def empty(self) -> SubPresentation:
        return SubPresentation()

    def kernel_base(self) -> SubPresentation:
        return SubPresentation((), tuple(self.kernel_elements()))

    def as_sub_of(self, F1: EFieldPresentation) -> SubPresentation:
        """This presentation viewed inside an extension F1 (names shared)."""
        return SubPresentation(tuple(RatPoly.var(F1.ctx, g) for g in self.gens),
                               tuple(d.embed(F1.ctx) for d in self.dspan))

    # ------------------------------------------------------------ invariants

    def violations(self) -> list[str]:
        out = []
        one = RatPoly.const(self.ctx, 1)
        coords = []
        for i, p in enumerate(self.pairs):
            c = self.coordinates(p.element)
            if c is None:
                out.append(f"exp pair {i + 1}: {p.element} is not in D")
            coords.append(c)
            if self.ideal.contains(p.value):
                out.append(f"exp pair {i + 1}: value {p.value} is zero")
        for i in self.kernel:
            if not 0 <= i < len(self.pairs):
                out.append(f"kernel index {i + 1} out of range")
            elif self.pairs[i].value != one:
                out.append(f"kernel pair {i + 1} has value {self.pairs[i].value}, not 1")
        if self.tau is not None and self.tau not in self.kernel:
            out.append("tau must be a kernel pair")
        # injectivity of D -> F on declared data
        if linalg.ldim(self._dvecs) != len(self.dspan):
            out.append("dspan elements are Q-linearly dependent in the field")
        if out:
            return out
        # homomorphism: every integer relation among pair coordinates must
        # hold multiplicatively among the values
        if self.pairs:
            den = 1
            for c in coords:
                for x in c:
                    den = lcm(den, x.denominator)
            A = IntMat.from_rows([[int(x * den) for x in c] for c in coords], cols=len(self.dspan))
            K = linalg.integer_kernel(A)
            for r in range(K.rows):
                num, dd = RatPoly.const(self.ctx, 1), RatPoly.const(self.ctx, 1)
                for p, e in zip(self.pairs, K.row(r)):
                    if e > 0:
                        num = num * p.value ** e
                    elif e < 0:
                        dd = dd * p.value ** (-e)
                if not self.ideal.contains(num - dd):
                    out.append(f"exp is not a homomorphism on declared data (relation {list(K.row(r))})")
        return out

    def warnings(self, height: int = 1) -> list[str]:
        """Multiplicative relations among the exp values that hold in the
        field but are not implied by the declared pair lattice."""
        out = []
        if not self.pairs:
            return out
        n = len(self.pairs)
        den, basis, _ = self._lattice_data()
        for v in linalg.integer_vectors(n, height):
            num, dd = RatPoly.const(self.ctx, 1), RatPoly.const(self.ctx, 1)
            for p, e in zip(self.pairs, v):
                if e > 0:
                    num = num * p.value ** e
                elif e < 0:
                    dd = dd * p.value ** (-e)
            if self.ideal.contains(num - dd):
                comb = [sum(Fraction(e) * c[j] for e, c in zip(v, self.pair_coords))
                        for j in range(len(self.dspan))]
                if any(comb) and self.kernel_indices() == []:
                    out.append(f"undeclared kernel element with exponents {list(v)}")
                elif any(comb):
                    kc = [self.pair_coords[i] for i in self.kernel_indices()]
                    if linalg.rational_rank(kc + [comb]) > linalg.rational_rank(kc):
                        out.append(f"undeclared kernel element with exponents {list(v)}")
        return out

    # ------------------------------------------------------------ derived presentations

    def replace(self, **kw) -> EFieldPresentation:
        args = dict(gens=self.gens, relations=self.relations, dspan=self.dspan, pairs=self.pairs,
                    kernel=self.kernel, tau=self.tau, roots=self.roots, root_level=self.root_level,
                    stabilizer=self.stabilizer)
        args.update(kw)
        return EFieldPresentation(**args)

    def with_roots(self, level: int) -> EFieldPresentation:
        """Adjoin a coherent system of primitive roots of unity up to level,
        declaring exp(tau/m) = zeta_m when tau is marked.

        Only prime powers get symbols: zeta_p is a root of the p-th cyclotomic
        polynomial and zeta_(p^k)^p = zeta_(p^(k-1)). A composite m is written
        as a monomial in those symbols by the Chinese remainder theorem.
        """
        if level <= self.root_level:
            return self
        gens = list(self.gens)
        roots = dict(self.roots)
        for q in range(2, level + 1):
            if _prime_power(q) and q not in roots:
                name = zeta_name(q)
                if name in gens:
                    raise EFieldError(f"generator name {name} is reserved for roots of unity")
                gens.append(name)
                roots[q] = name
        ctx = VarContext.of(gens, "auxiliary")
        rels = [r.embed(ctx) for r in self.relations]
        for q, name in roots.items():
            if q > self.root_level:
                p, k = _prime_power(q)
                z = RatPoly.var(ctx, name)
                rels.append(_cyclotomic_prime(z, p) if k == 1 else z ** p - RatPoly.var(ctx, roots[q // p]))
        pairs = [ExpPair(p.element.embed(ctx), p.value.embed(ctx)) for p in self.pairs]
        if self.tau is not None:
            t = self.pairs[self.tau].element.embed(ctx)
            have = {str(p.element) for p in pairs}
            for m in range(2, level + 1):
                e = t.scale(Fraction(1, m))
                if str(e) not in have:
                    pairs.append(ExpPair(e, _zeta_value(ctx, roots, m)))
        return EFieldPresentation(gens, rels, [d.embed(ctx) for d in self.dspan], pairs, self.kernel,
                                  self.tau, roots, level, [s.embed(ctx) for s in self.stabilizer])

    def zeta(self, m: int) -> RatPoly:
        if m == 1:
            return RatPoly.const(self.ctx, 1)
        if m > self.root_level:
            raise EFieldError(f"roots of unity only go up to level {self.root_level}")
        return _zeta_value(self.ctx, self.roots, m)

    # ------------------------------------------------------------ serialization

    def canonical(self) -> str:
        """Text form that does not depend on declaration order."""
        lines = ["gens: " + ", ".join(self.gens)]
        for g in sorted(format_poly(r) for r in self.ideal.reduced().gens):
            lines.append("relation: " + g)
        for d in sorted(format_poly(self.normal(d)) for d in self.dspan):
            lines.append("dspan: " + d)
        keyed = []
        for i, p in enumerate(self.pairs):
            keyed.append(((format_poly(self.normal(p.element)), format_poly(self.normal(p.value))), i))
        keyed.sort()
        index = {old: new for new, (_, old) in enumerate(keyed)}
        for (e, v), _ in keyed:
            lines.append(f"exp: {e} -> {v}")
        if self.kernel:
            lines.append("kernel: " + " ".join(str(k) for k in sorted(index[i] + 1 for i in self.kernel)))
        if self.tau is not None:
            lines.append(f"tau: {index[self.tau] + 1}")
        if self.root_level:
            lines.append(f"roots: {self.root_level} " + " ".join(f"{m}={s}" for m, s in self.roots.items()))
        for s in sorted(format_poly(self.normal(s)) for s in self.stabilizer):
            lines.append("stabilizer: " + s)
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return isinstance(other, EFieldPresentation) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"EFieldPresentation(gens={list(self.gens)}, d={len(self.dspan)}, pairs={len(self.pairs)})"

    def to_json(self) -> dict:
        return {
            "gens": list(self.gens),
            "relations": [format_poly(r) for r in self.relations],
            "dspan": [format_poly(d) for d in self.dspan],
            "exp": [[format_poly(p.element), format_poly(p.value)] for p in self.pairs],
            "kernel": [i + 1 for i in self.kernel],
            "tau": None if self.tau is None else self.tau + 1,
            "root_level": self.root_level,
            "stabilizer": [format_poly(s) for s in self.stabilizer],
        }


def _zeta_value(ctx: VarContext, roots: Mapping[int, str], m: int) -> RatPoly:
    """zeta_m as a monomial in prime-power symbols: zeta_m = prod zeta_q^(e_q)
    with e_q (m/q) = 1 mod q, which makes zeta_m^(m/q) = zeta_q."""
    out = RatPoly.const(ctx, 1)
    rest = m
    p = 2
    factors = []
    while rest > 1:
        if rest % p == 0:
            q = 1
            while rest % p == 0:
                rest //= p
                q *= p
            factors.append(q)
        p += 1
    for q in factors:
        e = pow(m // q, -1, q)
        out = out * RatPoly.var(ctx, roots[q]) ** e
    return out


# ---------------------------------------------------------------- predimensions

def _require_d(items, what="element"):
    for e, c in items:
        if c is None:
            raise EFieldError(f"{what} {e} is outside the D-span")


def td_over(F: EFieldPresentation, elems: Sequence, base: Sequence) -> int:
    base = list(base)
    return F.td(base + list(elems)) - F.td(base)


def predim_delta(F: EFieldPresentation, a: ElementTuple, X: SubPresentation | None = None) -> int:
    """delta(a/X) = td(a, exp a / X, exp X) - ldim_Q(a/X)."""
    X = X or F.empty()
    items = F.resolve(a)
    _require_d(items)
    exps = [F.exp_power(c)[1] for _, c in items]
    base = F.base_elements(X)
    t = td_over(F, [e for e, _ in items] + exps, base)
    xc = F.base_coords(X)
    l = linalg.rational_rank(xc + [c for _, c in items]) - linalg.rational_rank(xc)
    return t - l


def predim_Delta(F1: EFieldPresentation, x: ElementTuple, F: SubPresentation | None = None) -> int:
    """Delta_(F1)(x/F): td over F and ker(F1), minus the Q-dimension of the
    D-entries of x over D(F) and ker(F1)."""
    F = F or F1.empty()
    items = F1.resolve(x)
    kernel = F1.kernel_elements()
    base = F1.base_elements(F) + kernel
    exps = [F1.exp_power(c)[1] for _, c in items if c is not None]
    t = td_over(F1, [e for e, _ in items] + exps, base)
    bc = F1.base_coords(F) + [F1.coordinates(k) for k in kernel]
    l = linalg.rational_rank(bc + [c for _, c in items if c is not None]) - linalg.rational_rank(bc)
    return t - l


@dataclass
class ProbeVerdict:
    status: str  # strong-over-probes | vacuously-strong-over-probes | not-strong | semistrong-over-probes | ...
    witness: ElementTuple | None = None
    value: int | None = None
    failed_check: str | None = None
    checked: int = 0

    @property
    def holds(self) -> bool:
        return not self.status.startswith("not-")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else [format_poly(e) for e in self.witness.elements],
            "value": self.value,
            "failed_check": self.failed_check,
            "probes_checked": self.checked,
        }


def check_strong(F: EFieldPresentation, X: SubPresentation, probes: Sequence[ElementTuple]) -> ProbeVerdict:
    if not probes:
        return ProbeVerdict("vacuously-strong-over-probes")
    v = ProbeVerdict("strong-over-probes")
    for p in probes:
        v.checked += 1
        d = predim_delta(F, p, X)
        if d < 0:
            return ProbeVerdict("not-strong", p, d, "delta >= 0", v.checked)
    return v


def sub_kernel(F1: EFieldPresentation, F: SubPresentation) -> list[RatPoly]:
    """ker(F) = D(F) n ker(F1), as a Q-basis of field elements."""
    dc = F1.base_coords(F)
    kc = [F1.coordinates(k) for k in F1.kernel_elements()]
    if not dc or not kc:
        return []
    # c.K = d.D  <=>  (c, -d) in the left kernel of [K; D]
    rels = linalg.q_linear_relations(kc + dc)
    out = []
    for r in rels:
        coords = [sum(Fraction(r[i]) * kc[i][j] for i in range(len(kc))) for j in range(len(F1.dspan))]
        if any(coords):
            out.append(coords)
    basis, _ = linalg.rational_rref(out) if out else ([], [])
    return [F1.d_element(c) for c in basis]


def check_semistrong(F1: EFieldPresentation, F: SubPresentation, probes: Sequence[ElementTuple]) -> ProbeVerdict:
    if not probes:
        return ProbeVerdict("vacuously-semistrong-over-probes")
    kF = sub_kernel(F1, F)
    kF1 = F1.kernel_elements()
    v = ProbeVerdict("semistrong-over-probes")
    for p in probes:
        v.checked += 1
        d = predim_Delta(F1, p, F)
        if d < 0:
            return ProbeVerdict("not-semistrong", p, d, "Delta >= 0", v.checked)
        elems = [e for e, _ in F1.resolve(p)]
        if td_over(F1, elems, kF + kF1) != td_over(F1, elems, kF):
            return ProbeVerdict("not-semistrong", p, None, "kernel algebraic independence", v.checked)
    return v


def check_addition_property(F: EFieldPresentation, x: ElementTuple, y: ElementTuple,
                            A: SubPresentation | None = None) -> bool:
    A = A or F.empty()
    lhs = predim_Delta(F, x + y, A)
    rhs = predim_Delta(F, x, A.joined(F, y)) + predim_Delta(F, y, A)
    return lhs == rhs


@dataclass
class EtdBound:
    value: int
    argmin: tuple
    searched: int
    bound: int
    bounded: bool = True

    def to_json(self) -> dict:
        return {"etd_upper": self.value, "argmin": [format_poly(c) for c in self.argmin],
                "tuples_searched": self.searched, "search_bound": self.bound, "bounded": self.bounded}


def etd_upper(F: EFieldPresentation, b: ElementTuple, A: SubPresentation | None = None,
              search_bound: int = 2) -> EtdBound:
    """min over sub-tuples c of the generators (|c| <= bound) of Delta(b c / A)."""
    A = A or F.empty()
    pool, seen = [], set()
    for e in list(F.dspan) + [F.var(g) for g in F.gens]:
        k = format_poly(F.normal(e))
        if k not in seen:
            seen.add(k)
            pool.append(e)
    best, arg, count = None, (), 0
    for r in range(search_bound + 1):
        for c in itertools.combinations(pool, r):
            count += 1
            val = predim_Delta(F, b + ElementTuple(c), A)
            if best is None or val < best:
                best, arg = val, c
    return EtdBound(best, arg, count, search_bound)


# ---------------------------------------------------------------- kernel extensions

def _check_residues(residues: Mapping[int, int], level: int, label: str) -> dict[int, int]:
    res = {1: 0}
    for m in range(2, level + 1):
        if m not in residues:
            raise PurityError(f"{label}: missing residue modulo {m}")
        r = residues[m]
        if not 0 <= r < m:
            raise PurityError(f"{label}: residue {r} modulo {m} out of range")
        res[m] = r
    for m in range(2, level + 1):
        for d in range(2, m):
            if m % d == 0 and res[m] % d != res[d]:
                raise PurityError(f"{label}: residues mod {d} and mod {m} disagree")
    return res


def kernel_extend(F: EFieldPresentation, new: Sequence[RatPoly], residues: Sequence[Mapping[int, int]],
                  level: int = DEFAULT_LEVEL) -> EFieldPresentation:
    """Extend the kernel to A = ker(F) + <new>, where new[j] = r tau (mod mA)
    with r = residues[j][m]. On D(F') = D(F) + Q A the exponential is
    exp(a/m + b) = zeta_m^r exp(b)."""
    if len(new) != len(residues):
        raise EFieldError("one residue table per new generator is required")
    if not new:
        return F
    F.tau_element()
    new = [a.embed(F.ctx) for a in new]
    # A n D(F) = ker(F) on declared data: the new generators must be
    # independent over D(F)
    elems = list(F.dspan) + new
    rels = linalg.q_linear_relations(F._nf_vectors(elems))
    kc = [F.coordinates(k) for k in F.kernel_elements()]
    kden = 1
    for c in kc:
        for x in c:
            kden = lcm(kden, x.denominator)
    for r in rels:
        part = r[len(F.dspan):]
        if not any(part):
            continue
        g = 0
        for x in part:
            g = gcd(g, x)
        w = RatPoly.const(F.ctx, 0)
        for c, a in zip(part, new):
            w = w + a.scale(Fraction(c, g))
        wc = F.coordinates(w)
        scaled = [x * kden for x in wc]
        in_kernel = False
        if kc and all(x.denominator == 1 for x in scaled):
            K = IntMat.from_rows([[int(x * kden) for x in c] for c in kc], cols=len(F.dspan))
            in_kernel = linalg.solve_integer(K, [int(x) for x in scaled]) is not None
        if not in_kernel:
            raise KernelMismatchError(f"{format_poly(w)} lies in D(F) but not in ker(F)")
        raise KernelMismatchError(f"{format_poly(w)} already lies in ker(F)")
    tables = [_check_residues(res, level, format_poly(a)) for a, res in zip(new, residues)]
    G = F.with_roots(level)
    pairs = list(G.pairs)
    kernel = list(G.kernel)
    for a, res in zip(new, tables):
        a = a.embed(G.ctx)
        kernel.append(len(pairs))
        pairs.append(ExpPair(a, RatPoly.const(G.ctx, 1)))
        for m in range(2, level + 1):
            val = G.normal(G.zeta(m) ** res[m])
            if val == RatPoly.const(G.ctx, 1):
                kernel.append(len(pairs))
            pairs.append(ExpPair(a.scale(Fraction(1, m)), val))
    return G.replace(dspan=list(G.dspan) + [a.embed(G.ctx) for a in new], pairs=pairs, kernel=kernel)


def stabilizer_extend(F: EFieldPresentation, ring_gens: Sequence[RatPoly],
                      residues: Sequence[Mapping[int, int]], level: int = DEFAULT_LEVEL) -> EFieldPresentation:
    """Make the additive generators r of R multiplicative stabilizers of the
    kernel by adjoining r tau to the kernel (r -> r tau is the bijection
    Z(F) -> ker(F) given by the marked generator)."""
    if F.tau is None:
        raise EFieldError("stabilizer extension needs the tau marker")
    if not ring_gens:
        return F
    tau = F.tau_element()
    out = kernel_extend(F, [r.embed(F.ctx) * tau for r in ring_gens], residues, level)
    return out.replace(stabilizer=list(out.stabilizer) + [r.embed(out.ctx) for r in ring_gens])


def _nf_vectors(self: EFieldPresentation, elems: Sequence[RatPoly]) -> list[list[Fraction]]:
    nfs = [self.ideal.normal_form(e.embed(self.ctx)) for e in elems]
    monos = sorted({m for p in nfs for m in p.terms})
    return [[p.terms.get(m, Fraction(0)) for m in monos] for p in nfs]


EFieldPresentation._nf_vectors = _nf_vectors


# ---------------------------------------------------------------- roots

def declared_roots(F: EFieldPresentation, target: RatPoly, level: int) -> dict[int, RatPoly]:
    """Roots exp(d/m) of target = exp(d) already determined by declared data."""
    target = target.embed(F.ctx)
    out = {}
    for p, c in zip(F.pairs, F.pair_coords):
        if not F.is_zero(p.value - target):
            continue
        for m in range(2, level + 1):
            if m in out:
                continue
            k, (num, den) = F.exp_power([x / m for x in c])
            if k == 1 and den.is_constant():
                out[m] = num.scale(1 / den.constant_value())
        break
    return out


def coherent_root_oracle(F: EFieldPresentation, target: RatPoly, level: int,
                         declared: Mapping[int, RatPoly] | None = None, prefix: str | None = None
                         ) -> CoherentRootSystem:
    """Deterministic coherent system of roots of ``target`` up to ``level``.

    Declared roots (explicit, or implied by the exp graph) are kept; any
    other level gets its principal choice: 1 when all the roots it must sit
    over are 1, otherwise a fresh symbol whose only relations are the
    coherence equations.
    """
    target = target.embed(F.ctx)
    if F.is_zero(target):
        raise EFieldError("the root oracle needs a nonzero target")
    known = declared_roots(F, target, level)
    for m, v in (declared or {}).items():
        known[m] = v.embed(F.ctx) if isinstance(v, RatPoly) else F.element(v)
    ctx = F.ctx
    values = {1: target}
    symbols, rels = [], []
    base = prefix or "rho"
    ideal = F.ideal
    for m in range(2, level + 1):
        below = [values[m // p] for p in _primes_dividing(m)]
        if m in known:
            v = known[m].embed(ctx)
            for p in _primes_dividing(m):
                if not ideal.contains(v ** p - values[m // p]):
                    raise RootConflictError(f"declared root at level {m} is not a root of the level {m // p} value")
            values[m] = v
            continue
        one = RatPoly.const(ctx, 1)
        if all(ideal.contains(b - one) for b in below):
            values[m] = one
            continue
        name = fresh_name(ctx, f"{base}{m}")
        ctx = ctx.extend([name], "auxiliary")
        values = {k: v.embed(ctx) for k, v in values.items()}
        z = RatPoly.var(ctx, name)
        new = [z ** p - values[m // p] for p in _primes_dividing(m)]
        rels = [r.embed(ctx) for r in rels] + new
        symbols.append(name)
        ideal = IdealBasis(ctx, [g.embed(ctx) for g in F.ideal.gens] + rels)
        if ideal.is_unit():
            raise RootConflictError(f"no root at level {m} is consistent with the declared roots")
        values[m] = z
    system = CoherentRootSystem(level, values[1].embed(ctx), {k: v.embed(ctx) for k, v in values.items()},
                                ctx, symbols, [r.embed(ctx) for r in rels])
    return system


# ---------------------------------------------------------------- ELA steps

@dataclass(frozen=True)
class Algebraic:
    poly: str  # polynomial in the generators and ``symbol``
    symbol: str = "s"


@dataclass(frozen=True)
class Exponentiate:
    a: str


@dataclass(frozen=True)
class Logarithm:
    b: str
    symbol: str = "s"


@dataclass
class StepRecord:
    case: int
    tag: str
    new_gens: list
    new_relations: list
    d_added: list
    kernel_growth: bool = False
    flags: list = field(default_factory=list)
    delta: int | None = None
    td_increment: int | None = None

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "tag": self.tag,
            "new_gens": list(self.new_gens),
            "new_relations": [format_poly(r) for r in self.new_relations],
            "d_added": [format_poly(d) for d in self.d_added],
            "kernel_growth": self.kernel_growth,
            "flags": list(self.flags),
            "delta_new_over_old": self.delta,
            "td_increment": self.td_increment,
        }


def _extend_ctx(F: EFieldPresentation, names: Sequence[str]) -> VarContext:
    return VarContext.of(list(F.gens) + list(names), "auxiliary")


def _root_tower(ctx: VarContext, base: RatPoly, level: int, prefix: str):
    """Fresh symbols r_m (2 <= m <= level) with r_m^p = r_(m/p), r_1 = base."""
    values = {1: base}
    names, rels = [], []
    for m in range(2, level + 1):
        name = fresh_name(ctx, f"{prefix}_r{m}")
        ctx = ctx.extend([name], "auxiliary")
        names.append(name)
        z = RatPoly.var(ctx, name)
        for p in _primes_dividing(m):
            rels.append(z ** p - values[m // p].embed(ctx))
        values[m] = z
    return ctx, names, [r.embed(ctx) for r in rels], {k: v.embed(ctx) for k, v in values.items()}


def ela_step(F: EFieldPresentation, request, level: int = 2) -> tuple[EFieldPresentation, StepRecord]:
    if isinstance(request, Algebraic):
        return _case_algebraic(F, request)
    if isinstance(request, Exponentiate):
        return _case_exponentiate(F, request, level)
    if isinstance(request, Logarithm):
        return _case_logarithm(F, request, level)
    raise EFieldError(f"malformed ELA request {request!r}")


def _case_algebraic(F, req: Algebraic):
    if req.symbol in F.gens:
        raise EFieldError(f"{req.symbol} is already a generator")
    ctx = _extend_ctx(F, [req.symbol])
    p = parse_poly(req.poly, ctx)
    if p.degree_in(req.symbol) < 1:
        raise EFieldError("the polynomial must involve the new symbol")
    G = F.replace(gens=ctx.names, relations=list(F.relations) + [p])
    rec = StepRecord(1, "algebraic", [req.symbol], [p], [], flags=["irreducibility caller-asserted"])
    rec.td_increment = G.td([G.var(g) for g in G.gens]) - F.td([F.var(g) for g in F.gens])
    return G, rec


def _case_exponentiate(F, req: Exponentiate, level):
    a = F.element(req.a)
    c = F.coordinates(a)
    if c is not None:
        val = F.exp_of(c)
        if val is None:
            raise EFieldError("a lies in D but exp(a) is not determined by the declared pairs")
        rec = StepRecord(2, "exponentiate", [], [], [], flags=["exp already declared"])
        rec.flags.append("value: " + format_poly(val[0]) + ("" if val[1].is_constant() and val[1].constant_value() == 1
                                                            else " / " + format_poly(val[1])))
        return F, rec
    s = fresh_name(F.ctx, "s")
    ctx = _extend_ctx(F, [s])
    ctx, roots, rels, values = _root_tower(ctx, RatPoly.var(ctx, s), level, s)
    a = a.embed(ctx)
    pairs = list(F.pairs) + [ExpPair(a.scale(Fraction(1, m)), values[m]) for m in range(1, level + 1)]
    G = EFieldPresentation(ctx.names, list(F.relations) + rels, list(F.dspan) + [a], pairs, F.kernel,
                           F.tau, F.roots, F.root_level, F.stabilizer)
    rec = StepRecord(2, "exponentiate", [s] + roots, rels, [a])
    rec.delta = predim_delta(G, G.tuple(a), F.as_sub_of(G))
    return G, rec


def _case_logarithm(F, req: Logarithm, level):
    b = F.element(req.b)
    if F.is_zero(b):
        raise EFieldError("cannot take the logarithm of 0")
    sym = req.symbol if req.symbol not in F.gens else fresh_name(F.ctx, req.symbol)
    roots = coherent_root_oracle(F, b, level, prefix=f"{sym}_r")
    names = [sym] + roots.symbols
    ctx = _extend_ctx(F, names)
    s = RatPoly.var(ctx, sym)
    pairs = list(F.pairs)
    kernel = list(F.kernel)
    one = RatPoly.const(ctx, 1)
    growth = F.is_zero(b - 1)
    for m in range(1, level + 1):
        v = roots.values[m].embed(ctx)
        if v == one:
            kernel.append(len(pairs))
        pairs.append(ExpPair(s.scale(Fraction(1, m)), v))
    rels = [r.embed(ctx) for r in roots.relations]
    G = EFieldPresentation(ctx.names, list(F.relations) + rels, list(F.dspan) + [s], pairs, kernel,
                           F.tau, F.roots, F.root_level, F.stabilizer)
    rec = StepRecord(3, "logarithm", names, rels, [s], kernel_growth=growth)
    if growth:
        rec.flags.append("exp(s) = 1: s joins the kernel")
    rec.delta = predim_delta(G, G.tuple(s), F.as_sub_of(G))
    return G, rec


# ---------------------------------------------------------------- evaluation

def exp_values(F: EFieldPresentation, t: ElementTuple) -> list[tuple[RatPoly, Quot]]:
    """(a_i, e^(a_i)) for every entry of t."""
    out = []
    for e, c in F.resolve(t):
        if c is None:
            raise EFieldError(f"{format_poly(e)} is not in D: evaluation outside the declared exp graph")
        k, val = F.exp_power(c)
        if k != 1:
            raise EFieldError(f"only exp({k}*({format_poly(e)})) is declared: "
                              "evaluation outside the declared exp graph")
        out.append((e, val))
    return out


def evaluate_at(F: EFieldPresentation, p: RatPoly, values: Mapping[str, object]) -> RatPoly:
    """p at the given values (RatPoly or (num, den) over F), cleared of
    denominators, in normal form. Each variable v of value num/den is replaced
    by num * den^(deg_v(p) - k) in a term of v-degree k; the result is zero in
    F exactly when p vanishes at the point."""
    names = p.ctx.names
    vals = []
    for n in names:
        if n in values:
            v = values[n]
        elif n in F.ctx:
            v = F.var(n)
        else:
            raise EFieldError(f"no value for {n}")
        num, den = (v, RatPoly.const(F.ctx, 1)) if isinstance(v, RatPoly) else v
        vals.append((num.embed(F.ctx), den.embed(F.ctx)))
    degs = [p.degree_in(n) for n in names]
    cache: dict = {}

    def power(i, k, which):
        key = (i, k, which)
        if key not in cache:
            base = vals[i][which]
            cache[key] = F.normal(base ** k) if k else RatPoly.const(F.ctx, 1)
        return cache[key]

    total = RatPoly.const(F.ctx, 0)
    for mono, c in p.terms.items():
        term = RatPoly.const(F.ctx, c)
        for i, k in enumerate(mono):
            if degs[i] == 0:
                continue
            term = term * power(i, k, 0)
            if vals[i][1] != 1 and degs[i] - k:
                term = term * power(i, degs[i] - k, 1)
        total = total + F.normal(term)
    return F.normal(total)


def transcendence_basis(F: EFieldPresentation) -> tuple[str, ...]:
    """A subset of the generators that is a transcendence basis of F."""
    if getattr(F, "_tbasis", None) is None:
        chosen: list[str] = []
        for g in F.gens:
            if F.td([F.var(x) for x in chosen + [g]]) > len(chosen):
                chosen.append(g)
        F._tbasis = tuple(chosen)
    return F._tbasis


def dim_over_field(F: EFieldPresentation, ideal: IdealBasis) -> int:
    """Dimension over F of the variety cut out by ``ideal`` (in a context
    containing F's generators): the relations are added and a transcendence
    basis of F is treated as parameters."""
    ctx = ideal.ctx
    rel = [r.embed(ctx) for r in F.relations]
    return ideal.plus(rel).dimension(ignoring=transcendence_basis(F))
