"""Scheme instances (Strong Kernel, SEAC) as formulas, witness checking
against finite presentations, and the EAC reduction pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from . import linalg
from .efield import (
    EFieldError,
    EFieldPresentation,
    ElementTuple,
    SubPresentation,
    dim_over_field,
    evaluate_at,
    exp_values,
    td_over,
)
from .formula import Annot, Eq, Formula, Implies, Not, Or, conj, exists, forall
from .gvariety import (
    FreenessReport,
    GVariety,
    PreconditionError,
    RotundityVerdict,
    act,
    add_free_reduce,
    additively_free,
    generic_hyperplane_cut,
    mult_free_reduce,
    multiplicatively_free_up_to,
    rabinovich_extend,
    rotund_up_to,
)
from .linalg import IntMat
from .poly import EMPTY_DIM, IdealBasis, RatPoly, VarContext, eliminate, format_poly, monomial_binomial, saturate
from .torus import TorusSubgroup, product_of, subgroup_depth

VALID = "witness-valid"
INVALID = "witness-invalid"
UNDECIDED = "undecided"
NO_WITNESS = "no-witness-supplied"


class AxiomError(ValueError):
    pass


class CertificationError(AxiomError):
    pass


# ---------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    passed: bool | None
    quantities: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "quantities": dict(self.quantities)}


@dataclass
class WitnessReport:
    scheme: str
    inputs: dict
    checks: list = field(default_factory=list)
    verdict: str = UNDECIDED
    reason: str = ""
    notes: list = field(default_factory=list)
    _recompute: Callable | None = field(default=None, repr=False, compare=False)

    def add(self, name: str, passed, **quantities) -> Check:
        c = Check(name, passed, quantities)
        self.checks.append(c)
        return c

    def finish(self, verdict: str, reason: str = "") -> WitnessReport:
        self.verdict = verdict
        self.reason = reason
        return self

    @property
    def valid(self) -> bool:
        return self.verdict == VALID

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "inputs": dict(self.inputs),
            "checks": [c.to_json() for c in self.checks],
            "verdict": self.verdict,
            "reason": self.reason,
            "notes": list(self.notes),
        }

    def reverify(self) -> bool:
        """Recompute the report from its stored inputs and compare."""
        if self._recompute is None:
            return False
        return self._recompute().to_json() == self.to_json()


# ---------------------------------------------------------------- V over F

class _Specialized:
    """V with its parameters replaced by elements of F, as an ideal in
    x, y and the generators of F."""

    def __init__(self, F: EFieldPresentation, V: GVariety, params: Mapping[str, object] | None):
        params = dict(params or {})
        missing = [p for p in V.params if p not in params]
        if missing:
            raise AxiomError(f"no value for parameter(s) {', '.join(missing)}")
        clash = [n for n in list(V.xs) + list(V.ys) if n in F.ctx]
        if clash:
            raise AxiomError(f"presentation generators clash with coordinates: {', '.join(clash)}")
        self.F, self.V = F, V
        self.n = V.n
        names = tuple(V.xs) + tuple(V.ys) + F.gens
        roles = ("additive",) * V.n + ("multiplicative",) * V.n + ("auxiliary",) * len(F.gens)
        ctx = VarContext(names, roles)
        self.ctx = ctx
        images = {}
        for p in V.params:
            v = params[p]
            v = F.element(v) if isinstance(v, str) else v
            images[p] = v.embed(ctx)
        for x in list(V.xs) + list(V.ys):
            images[x] = RatPoly.var(ctx, x)
        self.param_values = {p: format_poly(F.normal(images[p].embed(F.ctx))) for p in V.params}
        self.param_elems = [F.normal(images[p].embed(F.ctx)) for p in V.params]
        gens = [g.substitute(images, ctx) for g in V.ideal.gens]
        gens += [r.embed(ctx) for r in F.relations]
        self.ideal = saturate(IdealBasis(ctx, gens), product_of(ctx, V.ys))
        self._dim = None
        self._W = None

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = dim_over_field(self.F, self.ideal)
        return self._dim

    def image(self) -> IdealBasis:
        if self._W is None:
            self._W = eliminate(self.ideal, self.V.xs)
        return self._W

    def proj_dim(self) -> int:
        return dim_over_field(self.F, self.image())

    def values(self, point: ElementTuple) -> tuple[dict, list]:
        vals = exp_values(self.F, point)
        if len(vals) != self.n:
            raise AxiomError(f"point has {len(vals)} entries, V lives in G^{self.n}")
        out = {}
        for i, (a, ea) in enumerate(vals):
            out[self.V.xs[i]] = a
            out[self.V.ys[i]] = ea
        return out, vals

    def contains(self, values: dict) -> list[str]:
        """Generators of V that do not vanish at the point."""
        bad = []
        for g in self.ideal.gens:
            if not evaluate_at(self.F, g, values).is_zero():
                bad.append(format_poly(g))
        return bad

    def fibre_dim(self, exps: list) -> int:
        extra = []
        for y, (num, den) in zip(self.V.ys, exps):
            extra.append(RatPoly.var(self.ctx, y) * den.embed(self.ctx) - num.embed(self.ctx))
        return dim_over_field(self.F, self.ideal.plus(extra))


def _point_text(F, point: ElementTuple) -> list[str]:
    return [format_poly(F.normal(e.embed(F.ctx))) for e in point.elements]


def _check_membership(report: WitnessReport, S: _Specialized, values: dict) -> bool:
    bad = S.contains(values)
    report.add("point on V", not bad, failing_generators=bad)
    return not bad


# ---------------------------------------------------------------- Strong Kernel

def _exp_names(n: int) -> list[str]:
    return [f"exp(x{i})" for i in range(1, n + 1)]


def strong_kernel_instance(V: GVariety) -> Formula:
    """The Strong Kernel axiom for the family V (parameters range over the
    kernel): dim V_k >= n or (x, e^x) not in V_k^gf or e^x in pr(V_k)^atyp."""
    n, ks = V.n, list(V.params)
    xs = [f"x{i}" for i in range(1, n + 1)]
    family = "; ".join(format_poly(g) for g in V.generators()) or "0"
    notes = [f"family V: {family}", f"n = {n}, m = {len(ks)}"]
    if V.dim >= n:
        notes.append("flag: trivially valid, dim V_k >= n on every nonempty fibre (first disjunct)")
    body = Or((
        Annot("dim-ge", tuple(ks), f"dim V_k >= {n}"),
        Not(Annot("in-gf", tuple(xs + _exp_names(n) + ks), "(x, exp x) in V_k^gf")),
        Annot("in-atyp", tuple(_exp_names(n) + ks), "exp x in pr(V_k)^atyp"),
    ))
    return Formula("strong-kernel", (), forall("ker", ks, forall("field", xs, body)), tuple(notes))


def check_strong_kernel_witness(F: EFieldPresentation, V: GVariety, x: ElementTuple, depth: int,
                                params: Mapping[str, object] | None = None) -> WitnessReport:
    """Check that x satisfies the instance through its last disjunct: a
    proper subgroup H of height <= depth contains e^x and meets pr(V) in
    more than the expected dimension."""
    if depth < 1:
        raise AxiomError("depth must be at least 1")
    S = _Specialized(F, V, params)
    for p, e in zip(V.params, S.param_elems):
        if not _kernel_status(F, e):
            raise AxiomError(f"parameter {p} = {format_poly(e)} is not a declared kernel element")
    report = WitnessReport("strong-kernel", {
        "n": V.n,
        "variety": [format_poly(g) for g in V.generators()],
        "params": S.param_values,
        "point": _point_text(F, x),
        "depth": depth,
    })
    report._recompute = lambda: check_strong_kernel_witness(F, V, x, depth, params)
    dim_V = S.dim
    report.add("dim V < n", dim_V < V.n, dim_V=dim_V, n=V.n)
    if dim_V >= V.n:
        raise PreconditionError(f"dim V = {dim_V} >= n = {V.n}: the first disjunct already holds")
    values, vals = S.values(x)
    if not _check_membership(report, S, values):
        return report.finish(INVALID, "point-not-on-variety")
    exps = [ea for _, ea in vals]
    dim_W = S.proj_dim()
    fib = S.fibre_dim(exps)
    in_gf = fib == dim_V - dim_W
    report.add("point in V^gf", in_gf, fibre_dim=fib, generic_fibre_dim=dim_V - dim_W, dim_prV=dim_W)
    if not in_gf:
        return report.finish(INVALID, "not-in-generic-fibre")
    n = V.n
    W = S.image()
    ys = list(V.ys)
    point = {y: e for y, e in zip(ys, exps)}
    # the smallest subgroup containing e^x that relations of height <= depth see
    rows, searched = [], 0
    for v in linalg.integer_vectors(n, depth):
        searched += 1
        if evaluate_at(F, monomial_binomial(W.ctx, v, ys), point).is_zero():
            rows.append(v)
    if not rows:
        report.add("atypical subgroup", None, searched=searched)
        return report.finish(UNDECIDED, f"bounded: no relation of height <= {depth} holds on e^x")
    H = TorusSubgroup.from_rows(n, rows)
    binoms = H.binomials(W.ctx, ys)
    X = saturate(W.plus(binoms), product_of(W.ctx, ys))
    dim_X = dim_over_field(F, X)
    atypical = dim_X != EMPTY_DIM and dim_X > dim_W + H.dim - n
    report.add("atypical subgroup", atypical if atypical else None, subgroup=H.M.to_rows(),
               subgroup_text=H.describe(), subgroup_depth=subgroup_depth(H, depth), dim_H=H.dim,
               dim_X=dim_X, dim_prV=dim_W, proof_inequality=f"{n} - {dim_W} + {dim_X} > {H.dim}",
               searched=searched)
    if not atypical:
        return report.finish(UNDECIDED, f"bounded: {H.describe()} meets pr(V) typically")
    report.notes.append("H is cut out by every relation of height <= depth that holds on e^x")
    report.notes.append("dim X is the dimension of the whole intersection pr(V) n H")
    report.notes.append("valid relative to declared data")
    return report.finish(VALID, f"e^x lies in {H.describe()}, atypically")


# ---------------------------------------------------------------- SEAC

def certify(V: GVariety, depth: int = 2, height: int = 1) -> tuple[RotundityVerdict, FreenessReport]:
    from .gvariety import freeness_report

    return rotund_up_to(V, depth), freeness_report(V, height)


def _linear(coeff_names: Sequence[str], var_names: Sequence[str], tail: str) -> str:
    parts = [f"{m}*{v}" for m, v in zip(coeff_names, var_names)]
    return " + ".join(parts) + f" - {tail}"


def seac_instance(V: GVariety, r: int, *, rotundity: RotundityVerdict | None = None,
                  freeness: FreenessReport | None = None, irreducible: bool = False) -> Formula:
    """The SEAC axiom for V with r parameters b. Integer coefficients are
    m1..m(n+r); b_i is paired with m(n+i)."""
    if not irreducible:
        raise CertificationError("V must be asserted irreducible")
    if rotundity is None or not rotundity.rotund:
        raise CertificationError("V needs a rotundity certificate")
    if freeness is None or not freeness.multiplicatively_free:
        raise CertificationError("V needs a multiplicative freeness certificate")
    n = V.n
    if V.dim != n:
        raise CertificationError(f"dim V = {V.dim}, expected {n}")
    if r < 0:
        raise AxiomError("r must be natural")
    xs = [f"x{i}" for i in range(1, n + 1)]
    ws = [f"w{i}" for i in range(1, n + 1)]
    vs = [f"y{i}" for i in range(1, n + 1)]
    bs = [f"b{i}" for i in range(1, r + 1)]
    ms = [f"m{i}" for i in range(1, n + r + 1)]
    gens = V.generators()

    def at_graph(v):
        if v.startswith("y") and v[1:].isdigit():
            return f"exp(x{v[1:]})"
        return v

    def at_w(v):
        return "w" + v[1:] if v.startswith("x") and v[1:].isdigit() else v

    on_graph = conj(Eq(format_poly(g, namer=at_graph)) for g in gens)
    on_w = conj(Eq(format_poly(g, namer=at_w)) for g in gens)
    lhs = _linear(ms, xs + bs, "t")
    rhs = _linear(ms, ws + bs, "t")
    core = Implies(on_w, conj([on_graph, Implies(Eq(lhs), Eq(rhs))]))
    body = forall("field", bs, exists("field", xs, forall("Z", ms, forall(
        "ker", ["t"], forall("field", ws + vs, core)))))
    notes = (
        "irreducible (asserted)",
        f"rotund up to depth {rotundity.depth}",
        f"multiplicatively free up to height {freeness.mult_height}",
        f"dim V = {n}",
        "V: " + ("; ".join(format_poly(g) for g in gens) or "0"),
    )
    free = tuple((p, "field") for p in V.params)
    return Formula("seac", free, body, notes)


def _kernel_status(F: EFieldPresentation, t: RatPoly) -> bool | None:
    c = F.coordinates(t)
    if c is None:
        return False
    try:
        k, (num, den) = F.exp_power(c)
    except EFieldError:
        return None
    if k != 1:
        return None
    return F.is_zero(num - den)


def check_seac_witness(F: EFieldPresentation, V: GVariety, b: ElementTuple, x: ElementTuple,
                       height: int, params: Mapping[str, object] | None = None) -> WitnessReport:
    """Membership, genericity over b, e^b and the kernel, and the
    Z-dependency side condition up to the height bound."""
    S = _Specialized(F, V, params)
    n, r = V.n, len(b)
    report = WitnessReport("seac", {
        "n": n,
        "variety": [format_poly(g) for g in V.generators()],
        "params": S.param_values,
        "b": _point_text(F, b),
        "point": _point_text(F, x),
        "height": height,
    })
    report._recompute = lambda: check_seac_witness(F, V, b, x, height, params)
    values, vals = S.values(x)
    if not _check_membership(report, S, values):
        return report.finish(INVALID, "point-not-on-variety")
    b_items = F.resolve(b)
    base = SubPresentation(tuple(e for e, _ in b_items) + tuple(S.param_elems),
                           tuple(e for e, c in b_items if c is not None) + tuple(F.kernel_elements()))
    t = td_over(F, [a for a, _ in vals] + [ea for _, ea in vals], F.base_elements(base))
    dim_V = S.dim
    failures = []
    report.add("generic over b, exp(b), ker", t == dim_V, td=t, dim_V=dim_V)
    if t != dim_V:
        failures.append(f"not generic: td = {t}, dim V = {dim_V}")
    undetermined, checked, witness = 0, 0, None
    elems = [a for a, _ in vals] + [e for e, _ in b_items]
    for m in linalg.integer_vectors(n + r, height):
        if not any(m[:n]):
            continue
        checked += 1
        t_elem = RatPoly.const(F.ctx, 0)
        for k, e in zip(m, elems):
            if k:
                t_elem = t_elem + e.embed(F.ctx).scale(k)
        status = _kernel_status(F, t_elem)
        if status is None:
            undetermined += 1
            continue
        if not status:
            continue
        xsum = RatPoly.const(F.ctx, 0)
        for k, a in zip(m[:n], vals):
            xsum = xsum + a[0].embed(F.ctx).scale(k)
        rel = xsum.embed(S.ctx).scale(-1)
        for k, xv in zip(m[:n], V.xs):
            rel = rel + RatPoly.var(S.ctx, xv).scale(k)
        if not S.ideal.contains(rel):
            witness = (list(m), format_poly(F.normal(t_elem)))
            break
    if witness:
        report.add("Z-dependencies", False, checked=checked, undetermined=undetermined, height=height,
                   witness=witness[0], kernel_element=witness[1])
        failures.insert(0, f"dependency {witness[0]} lands in the kernel but does not hold on V")
    else:
        report.add("Z-dependencies", True, checked=checked, undetermined=undetermined, height=height)
    report.notes.append(f"integer dependencies checked up to height {height}")
    if undetermined:
        report.notes.append(f"{undetermined} combinations lie outside the declared exp graph")
    if failures:
        return report.finish(INVALID, "; ".join(failures))
    report.notes.append("valid relative to declared data")
    return report.finish(VALID)


def check_eac_witness(F: EFieldPresentation, V: GVariety, x: ElementTuple | None = None,
                      params: Mapping[str, object] | None = None,
                      certify_depth: int | None = None) -> WitnessReport:
    """Membership of (x, e^x) in V; no genericity is demanded."""
    S = _Specialized(F, V, params)
    report = WitnessReport("eac", {
        "n": V.n,
        "variety": [format_poly(g) for g in V.generators()],
        "params": S.param_values,
        "point": _point_text(F, x) if x is not None else None,
        "certify_depth": certify_depth,
    })
    report._recompute = lambda: check_eac_witness(F, V, x, params, certify_depth)
    if certify_depth is not None:
        cert = rotund_up_to(V, certify_depth)
        report.add("rotund", cert.rotund, depth=certify_depth, checked=cert.checked_count)
        if not cert.rotund:
            raise PreconditionError(f"V is not rotund (witness {cert.witness.to_rows()})")
    if x is None:
        return report.finish(NO_WITNESS, "no point supplied")
    values, _ = S.values(x)
    if not _check_membership(report, S, values):
        return report.finish(INVALID, "point-not-on-variety")
    return report.finish(VALID)


# ---------------------------------------------------------------- reduction pipeline

@dataclass
class ReductionConfig:
    depth: int = 2
    height: int = 1
    seed: int = 0
    avoid: RatPoly | None = None
    certify: bool = True
    max_steps: int = 16


@dataclass
class PipelineStep:
    variety: GVariety
    tag: str
    justification: list
    certificate: RotundityVerdict | None = None

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "n": self.variety.n,
            "dim": self.variety.dim,
            "params": list(self.variety.params),
            "variety": [format_poly(g) for g in self.variety.generators()],
            "justification": list(self.justification),
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


class ReductionTrail(list):
    """The list of steps, plus notes on reductions that were not applicable."""

    def __init__(self, *a):
        super().__init__(*a)
        self.notes: list[str] = []

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self], "notes": list(self.notes)}


class PipelineError(RuntimeError):
    def __init__(self, message: str, trail: ReductionTrail):
        super().__init__(message)
        self.trail = trail


def _swap_last(n: int, j: int) -> IntMat:
    rows = [[int(i == k) for k in range(n)] for i in range(n)]
    rows[j], rows[n - 1] = rows[n - 1], rows[j]
    return IntMat.from_rows(rows, cols=n)


def _with_last_nonzero(V: GVariety, m: Sequence[int]) -> tuple[GVariety, tuple, list[str]]:
    """Permute coordinates so that the witness has a nonzero last entry."""
    n = V.n
    m = tuple(m)
    if m[n - 1]:
        return V, m, []
    j = next(i for i in range(n) if m[i])
    P = _swap_last(n, j)
    mm = list(m)
    mm[j], mm[n - 1] = mm[n - 1], mm[j]
    return act(P, V), tuple(mm), [f"swap coordinates {j + 1} and {n}"]


def eac_reduction_pipeline(V: GVariety, config: ReductionConfig | None = None) -> ReductionTrail:
    """Reduce an EAC instance to one that is of dimension n and free, then
    optionally extend by avoid-polynomial. Every output is re-certified rotund
    up to config.depth."""
    config = config or ReductionConfig()
    trail = ReductionTrail()
    if config.certify:
        start = rotund_up_to(V, config.depth)
        if not start.rotund:
            raise PreconditionError(f"input is not rotund (witness {start.witness.to_rows()})")

    def record(W, tag, just):
        cert = rotund_up_to(W, config.depth) if config.certify else None
        step = PipelineStep(W, tag, just, cert)
        trail.append(step)
        if cert is not None and not cert.rotund:
            raise PipelineError(f"{tag}: output is not rotund up to depth {config.depth}", trail)

    cur = V
    while len(trail) < config.max_steps:
        if cur.dim > cur.n:
            cut = generic_hyperplane_cut(cur, config.seed + len(trail))
            W = cut.variety
            if W.dim != cur.dim - 1:
                raise PipelineError(f"hyperplane cut gave dim {W.dim}, expected {cur.dim - 1}", trail)
            record(W, "hyperplane-cut", [
                f"generic hyperplane with coefficients {list(cut.coefficients)} (seed {config.seed + len(trail)})",
                f"check draw {list(cut.check_coefficients)} agrees on dim {W.dim}",
                f"dim {cur.dim} -> {W.dim}",
            ])
            cur = W
            continue
        free, w = multiplicatively_free_up_to(cur, config.height)
        if not free:
            if cur.n < 2:
                trail.notes.append("n = 1 with y1 constant on V: a logarithm of the constant solves it")
                break
            base, m, pre = _with_last_nonzero(cur, w)
            red = mult_free_reduce(base, m)
            record(red.variety, "multiplicative-reduction", pre + [f"y^{list(m)} is constant on V"] + red.trail)
            cur = red.variety
            continue
        free, w = additively_free(cur)
        if not free:
            if cur.n < 2:
                trail.notes.append("n = 1 with x1 constant on V: an exponential of the constant solves it")
                break
            base, m, pre = _with_last_nonzero(cur, w[:cur.n])
            # Mirror of the multiplicative case: the constant relation among
            # the x-coordinates is traded for a fixed value of y^m.
            red = add_free_reduce(base, m)
            record(red.variety, "additive-reduction", pre + [f"{list(m)}.x is constant on V"] + red.trail)
            cur = red.variety
            continue
        break
    else:
        raise PipelineError(f"no fixed point after {config.max_steps} steps", trail)
    if config.avoid is not None:
        W = rabinovich_extend(cur, config.avoid)
        record(W, "unit-extension", [f"adjoin x{cur.n + 1} with ({format_poly(config.avoid)})*x{cur.n + 1} = 1",
                                     f"dim {cur.dim} -> {W.dim}"])
    return trail


__all__ = [
    "AxiomError",
    "CertificationError",
    "Check",
    "PipelineError",
    "PipelineStep",
    "ReductionConfig",
    "ReductionTrail",
    "WitnessReport",
    "certify",
    "check_eac_witness",
    "check_seac_witness",
    "check_strong_kernel_witness",
    "eac_reduction_pipeline",
    "seac_instance",
    "strong_kernel_instance",
]
