import random

import pytest
import sympy

from expfield.poly import (
    EMPTY_DIM,
    GroebnerBudgetError,
    IdealBasis,
    LEX,
    ParseError,
    RatPoly,
    VarContext,
    budget,
    eliminate,
    format_poly,
    groebner,
    parse_poly,
    saturate,
)
from oracles import sympy_dimension

CTX = VarContext.of(["x", "y", "z"])


def P(text, ctx=CTX):
    return parse_poly(text, ctx)


def test_parse_and_format_round_trip():
    for text in ["x^2 - 2*x*y + 1/3", "-x*y*z", "0", "7/2", "x + y + z"]:
        assert format_poly(P(format_poly(P(text)))) == format_poly(P(text))


def test_expansion():
    assert P("-(x+y)^2") == P("-x^2 - 2*x*y - y^2")


@pytest.mark.parametrize("text,col", [("2x", 2), ("x y", 3), ("(x", 3), ("x^-1", 3), ("x + w", 5)])
def test_parse_errors_are_located(text, col):
    with pytest.raises(ParseError) as e:
        P(text)
    assert e.value.line == 1 and e.value.col == col


def test_exp_rejected_without_exp_map():
    with pytest.raises(ParseError):
        P("exp(x)")


def test_arithmetic_and_diff():
    p = P("x^2*y + 3*z")
    assert p.diff("x") == P("2*x*y")
    assert p.total_degree() == 3
    assert p.evaluate({"x": 2, "y": 1, "z": 0}) == 4
    assert (p - p).is_zero()


def test_groebner_twisted_cubic():
    I = IdealBasis(CTX, [P("x^2 - y"), P("x*y - z")])
    assert I.dimension() == 1
    assert I.groebner().is_reduced()
    assert I.normal_form(P("x^3")) == P("z")


def test_point_and_principal_dimensions():
    assert IdealBasis(CTX, [P("x - 1"), P("y"), P("z + 2")]).dimension() == 0
    assert IdealBasis(CTX, [P("x^2 + y^2 - z^3")]).dimension() == 2
    assert IdealBasis(CTX, [P("1")]).dimension() == EMPTY_DIM


def test_lex_basis_triangular():
    G = groebner([P("x^2 + y^2 - 1"), P("x - y")], CTX, order=LEX)
    last = [g for g in G.polys if not g.support() & {"x"}]
    assert last and all(g.support() <= {"y", "z"} for g in last)


def test_elimination_gives_implicit_equation():
    ctx = VarContext.of(["t", "x", "y"])
    I = IdealBasis(ctx, [P("x - t^2", ctx), P("y - t^3", ctx)])
    J = eliminate(I, ["t"])
    assert J.ctx.names == ("x", "y")
    assert J.contains(P("x^3 - y^2", J.ctx))
    assert not J.contains(P("x", J.ctx))


def test_saturation_removes_component():
    I = IdealBasis(CTX, [P("x*y"), P("x*z")])
    S = saturate(I, P("x"))
    assert S.contains(P("y")) and S.contains(P("z"))


def test_budget_error_carries_stats():
    with pytest.raises(GroebnerBudgetError) as e:
        with budget(max_degree=1):
            groebner([P("x^2 - y"), P("x*y - z")], CTX)
    assert "max_degree" in e.value.stats


def _random_ideal(rng, names):
    ctx = VarContext.of(names)
    gens = []
    for _ in range(rng.randint(1, 3)):
        terms = []
        for _ in range(rng.randint(1, 3)):
            mono = "*".join(f"{v}^{rng.randint(0, 2)}" for v in names)
            c = rng.randint(-5, 5)
            terms.append(f"{'-' if c < 0 else '+'} {abs(c)}*{mono}")
        gens.append(" ".join(terms).lstrip("+ "))
    return ctx, gens


@pytest.mark.parametrize("seed", range(30))
def test_dimension_matches_sympy(seed):
    rng = random.Random(seed)
    names = ["x", "y", "z"][: rng.randint(1, 3)]
    ctx, gens = _random_ideal(rng, names)
    polys = [parse_poly(g, ctx) for g in gens]
    if all(p.is_zero() for p in polys):
        return
    text = [format_poly(p) for p in polys if not p.is_zero()]
    assert IdealBasis(ctx, polys).dimension() == sympy_dimension(text, names)


@pytest.mark.parametrize("seed", range(10))
def test_reduced_basis_matches_sympy(seed):
    rng = random.Random(100 + seed)
    ctx, gens = _random_ideal(rng, ["x", "y"])
    polys = [parse_poly(g, ctx) for g in gens if not parse_poly(g, ctx).is_zero()]
    if not polys:
        return
    ours = sorted(format_poly(g) for g in groebner(polys, ctx).polys)
    x, y = sympy.symbols("x y")
    theirs = sympy.groebner([sympy.sympify(format_poly(p)) for p in polys], x, y, order="grevlex")
    def monic(e):
        return sympy.Poly(e, x, y).monic().as_expr()

    mine = {monic(sympy.sympify(g.replace("^", "**"))) for g in ours}
    assert mine == {monic(e) for e in theirs.exprs}
