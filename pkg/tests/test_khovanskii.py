import random

import pytest

from expfield import khovanskii as kh
from expfield.corpus import presentations
from expfield.formats import parse_ef, parse_ks
from expfield.poly import ParseError

PRES = dict(presentations())


def rand_exp_poly(rng, n, coeffs=()):
    atoms = [f"X{i}" for i in range(1, n + 1)] + [f"exp(X{i})" for i in range(1, n + 1)] + list(coeffs)
    terms = []
    for _ in range(rng.randint(1, 3)):
        mono = "*".join(rng.choice(atoms) for _ in range(rng.randint(0, 2))) or "1"
        c = rng.randint(-4, 4)
        terms.append(f"{'-' if c < 0 else '+'} {abs(c)}*{mono}")
    return kh.ExpPoly.parse(" ".join(terms).lstrip("+ "), n, coeffs)


def test_derivative_of_exp():
    f = kh.ExpPoly.parse("X1*exp(X1)", 1)
    assert kh.exp_derive(f, 1) == kh.ExpPoly.parse("exp(X1) + X1*exp(X1)", 1)


def test_iterated_exp_rejected():
    with pytest.raises(ParseError) as e:
        kh.ExpPoly.parse("exp(exp(X1))", 1)
    assert e.value.col == 5


def test_index_out_of_range():
    with pytest.raises(kh.KhovanskiiError):
        kh.exp_derive(kh.ExpPoly.parse("X1", 1), 2)


@pytest.mark.parametrize("seed", range(50))
def test_leibniz_linearity_mixed(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    f, g = rand_exp_poly(rng, n, ("a",)), rand_exp_poly(rng, n, ("a",))
    i, j = rng.randint(1, n), rng.randint(1, n)
    c = rng.randint(-5, 5)
    d = kh.exp_derive
    assert d(f * g, i) == d(f, i) * g + f * d(g, i)
    assert d(f + g.scale(c), i) == d(f, i) + d(g, i).scale(c)
    assert d(d(f, i), j) == d(d(f, j), i)


def test_fixed_point_certificate():
    S = parse_ks("width: 1\nf: exp(X1) - X1\n")
    assert kh.jacobian_det(S) == kh.ExpPoly.parse("exp(X1) - 1", 1)
    F = PRES["fixed-point"]
    v = kh.verify_certificate(F, S, F.tuple("a"))
    assert v.status == "valid" and v.jacobian_value == "a - 1"


def test_vanishing_jacobian_is_invalid():
    S = parse_ks("width: 1\nf: exp(X1) - 1\n")
    F = PRES["kernel-line"]
    v = kh.verify_certificate(F, S, F.tuple("k"))
    # exp(X1) - 1 has Jacobian exp(X1) = 1 at a kernel point
    assert v.status == "valid" and v.jacobian_value == "1"
    T = parse_ks("width: 1\nf: (exp(X1) - 1)^2\n")
    w = kh.verify_certificate(F, T, F.tuple("k"))
    assert w.status == "invalid" and "Jacobian" in w.reason


def test_non_solution_is_invalid():
    S = parse_ks("width: 1\nf: exp(X1) - X1\n")
    F = PRES["two-four"]
    v = kh.verify_certificate(F, S, F.tuple("a"))
    assert not v and "equation 1" in v.reason


def test_hidden_relations_make_certificate_unverified():
    F = parse_ef("gens: a, b\ndspan: a\ndspan: b\nexp: a -> 2\nexp: b -> 2\n")
    S = parse_ks("width: 1\nf: exp(X1) - 2\n")
    v = kh.verify_certificate(F, S, F.tuple("b"))
    assert v.status == "unverified" and "exponents [1, -1]" in v.reason


def test_width_zero():
    S = parse_ks("width: 0\n")
    assert kh.jacobian_det(S) == 1
    assert kh.chi_formula(S).body.value is True


def test_two_by_two_jacobian():
    S = parse_ks("width: 2\nf: exp(X1) - X1^2\nf: X2*exp(X2) - 1\n")
    expect = kh.ExpPoly.parse("(exp(X1) - 2*X1)*(exp(X2) + X2*exp(X2))", 2)
    assert kh.jacobian_det(S) == expect


def test_chi_formula_text():
    S = parse_ks("width: 1\ncoeffs: a\nf: exp(X1) - a\n")
    chi = kh.chi_formula(S)
    assert [v for v, _ in chi.free] == ["x1", "a"]
