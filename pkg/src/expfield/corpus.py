"""A small fixed corpus of inputs (n <= 2, degree <= 2) used by the tests,
the acceptance runner and the CLI samples.

G-varieties are given by rational parametrizations in t1..td; the ideal is
obtained by implicitization, so the parametrization stays available to
oracles that do not go through Groebner bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .efield import EFieldPresentation, ExpPair
from .formats import parse_ef, parse_ks, parse_mv
from .gvariety import GVariety, g_context
from .poly import IdealBasis, RatPoly, VarContext, eliminate, parse_poly


@dataclass(frozen=True)
class ParamVariety:
    name: str
    n: int
    d: int
    xs: tuple  # polynomial text in t1..td, one per additive coordinate
    ys: tuple  # numerator / denominator text pairs, or plain text

    def tnames(self) -> tuple[str, ...]:
        return tuple(f"t{i}" for i in range(1, self.d + 1))

    def variety(self) -> GVariety:
        return implicitize(self)


def _split(text: str) -> tuple[str, str]:
    if "|" in text:
        num, den = text.split("|")
        return num.strip(), den.strip()
    return text, "1"


def implicitize(P: ParamVariety) -> GVariety:
    """Closure of the image of t -> (x(t), y(t)) in G^n."""
    gctx = g_context(P.n)
    ctx = VarContext(gctx.names + P.tnames() + ("_den",),
                     gctx.roles + ("auxiliary",) * (P.d + 1))
    gens = []
    dens = RatPoly.const(ctx, 1)
    for i, x in enumerate(P.xs):
        gens.append(RatPoly.var(ctx, f"x{i + 1}") - parse_poly(x, ctx))
    for i, y in enumerate(P.ys):
        num, den = _split(y)
        nump, denp = parse_poly(num, ctx), parse_poly(den, ctx)
        gens.append(RatPoly.var(ctx, f"y{i + 1}") * denp - nump)
        dens = dens * denp * nump
    # y must be a unit and denominators must not vanish
    gens.append(RatPoly.var(ctx, "_den") * dens - 1)
    img = eliminate(IdealBasis(ctx, gens), P.tnames() + ("_den",))
    return GVariety(P.n, [g.embed(gctx) for g in img.gens], ctx=gctx)


def evaluate_param(P: ParamVariety, t) -> tuple[list[Fraction], list[Fraction]]:
    ctx = VarContext.of(P.tnames())
    vals = dict(zip(P.tnames(), t))
    xs = [parse_poly(x, ctx).evaluate(vals) for x in P.xs]
    ys = []
    for y in P.ys:
        num, den = _split(y)
        ys.append(parse_poly(num, ctx).evaluate(vals) / parse_poly(den, ctx).evaluate(vals))
    return xs, ys


GV_CORPUS = (
    ParamVariety("point-0-1", 1, 0, ("0",), ("1",)),
    ParamVariety("point-1-2", 1, 0, ("1",), ("2",)),
    ParamVariety("line-y-2", 1, 1, ("t1",), ("2",)),
    ParamVariety("line-x-0", 1, 1, ("0",), ("t1",)),
    ParamVariety("graph-y-x-plus-1", 1, 1, ("t1",), ("t1 + 1",)),
    ParamVariety("parabola", 1, 1, ("t1",), ("t1^2",)),
    ParamVariety("hyperbola", 1, 1, ("t1",), ("1 | t1",)),
    ParamVariety("plane-G1", 1, 2, ("t1",), ("t2",)),
    ParamVariety("point-G2", 2, 0, ("0", "0"), ("1", "1")),
    ParamVariety("shifted-graphs", 2, 2, ("t1", "t2"), ("t1 + 1", "t2 + 1")),
    ParamVariety("diagonal", 2, 2, ("t1", "t1"), ("t2", "t2")),
    ParamVariety("fixed-second", 2, 2, ("t1", "0"), ("t2", "1")),
    ParamVariety("antidiagonal", 2, 2, ("t1", "-t1"), ("t2", "1 | t2")),
    ParamVariety("square-and-sum", 2, 2, ("t1", "t2"), ("t1^2", "t1 + t2")),
    ParamVariety("swap", 2, 2, ("t1", "t2"), ("t2", "t1")),
    ParamVariety("curve-G2", 2, 1, ("t1", "t1"), ("t1", "t1")),
    ParamVariety("isogeny", 2, 2, ("t1", "2*t1"), ("t2", "t2^2")),
    ParamVariety("graph-fixed-second", 2, 1, ("t1", "0"), ("t1 + 1", "2")),
    ParamVariety("three-fold", 2, 3, ("t1", "t2"), ("t3", "t1 + t3")),
    ParamVariety("product-two", 2, 3, ("t1", "t2"), ("t3", "2 | t3")),
    ParamVariety("linear-three", 2, 3, ("t1", "t2"), ("t1 + t2", "t3")),
    ParamVariety("mixed-product", 2, 3, ("t1", "t2"), ("t3", "t1*t3")),
    ParamVariety("product-x", 2, 3, ("t1", "t2"), ("t3", "t1*t2")),
    ParamVariety("square-y", 2, 3, ("t1", "t2"), ("t3", "t3^2")),
    ParamVariety("x-from-y", 2, 3, ("t1", "t2 + t3"), ("t2", "t3")),
    ParamVariety("quadric", 2, 3, ("t1", "t2"), ("t3", "t1^2 + t3")),
    ParamVariety("G2", 2, 4, ("t1", "t2"), ("t3", "t4")),
)


def gvarieties() -> list[tuple[str, GVariety]]:
    return [(P.name, P.variety()) for P in GV_CORPUS]


# ---------------------------------------------------------------- other kinds

MV_TEXTS = {
    "point24": "n: 2\ny1 - 2\ny2 - 4\n",
    "torus2": "n: 2\n",
    "line-sum": "n: 2\ny1 + y2 - 1\n",
    "coset": "n: 2\ny1^2 - y2\n",
    "circle": "n: 2\ny1^2 + y2^2 - 1\n",
    "torsion1": "n: 1\ny1 + 1\n",
}

EF_TEXTS = {
    "fixed-point": "gens: a\ndspan: a\nexp: a -> a\n",
    "kernel-line": "gens: k\ndspan: k\nexp: k -> 1\nkernel: 1\ntau: 1\n",
    "two-four": "gens: a\ndspan: a\nexp: a -> 2\nexp: 2*a -> 4\n",
    "independent": "gens: a, b\ndspan: a\nexp: a -> b\n",
    "algebraic": "gens: a, s\nrelation: s^2 - a\ndspan: a\nexp: a -> s\n",
    "empty": "gens: c\n",
}

KS_TEXTS = {
    "fixed-point": "width: 1\nf: exp(X1) - X1\n",
    "kernel": "width: 1\nf: exp(X1) - 1\n",
    "diagonal": "width: 2\nf: exp(X1) - X1^2\nf: X2*exp(X2) - 1\n",
    "coupled": "width: 2\ncoeffs: a\nf: exp(X1) + X2 - a\nf: X1*exp(X2) - 1\n",
    "empty": "width: 0\n",
}


def mult_varieties():
    return [(k, parse_mv(v, k + ".mv")) for k, v in MV_TEXTS.items()]


def presentations():
    out = [(k, parse_ef(v, k + ".ef")) for k, v in EF_TEXTS.items()]
    base = dict(out)["kernel-line"]
    out.append(("kernel-line-roots", base.with_roots(2)))
    out.append(("counterexample", counterexample_presentation()))
    return out


def khovanskii_systems():
    return [(k, parse_ks(v, k + ".ks")) for k, v in KS_TEXTS.items()]


def counterexample_presentation(level: int = 2) -> EFieldPresentation:
    """Kernel generator t with a transcendental stabilizer element r."""
    from .efield import stabilizer_extend

    F0 = EFieldPresentation(["t", "r"])
    t = F0.var("t")
    F0 = EFieldPresentation(["t", "r"], dspan=[t], pairs=[ExpPair(t, RatPoly.const(F0.ctx, 1))],
                            kernel=[0], tau=0)
    r = F0.var("r")
    res = [{m: 0 for m in range(2, level + 1)}] * 2
    return stabilizer_extend(F0, [r, r * r], res, level)
