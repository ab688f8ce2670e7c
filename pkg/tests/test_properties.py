from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from expfield import khovanskii as kh
from expfield.linalg import IntMat, hermite_normal_form, is_hnf, minor_gcd, smith_normal_form
from expfield.poly import IdealBasis, RatPoly, VarContext, format_poly, groebner, parse_poly
from expfield.torus import TorusSubgroup, subgroup_depth

CTX = VarContext.of(["x", "y", "z"])


@st.composite
def matrices(draw, max_dim=4, bound=9):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r))
    return IntMat.from_rows(rows)


@st.composite
def polys(draw, ctx=CTX, max_terms=4, max_deg=3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_deg)) for _ in ctx.names)
        terms[mono] = Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 4)))
    p = RatPoly.const(ctx, 0)
    for mono, c in terms.items():
        p = p + RatPoly.monomial(ctx, dict(zip(ctx.names, mono)), c)
    return p


@given(matrices())
def test_snf_invariants(a):
    D, U, V = smith_normal_form(a)
    assert U @ a @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    ds = [D[i, i] for i in range(min(a.rows, a.cols))]
    for i in range(len(ds) - 1):
        assert ds[i] == 0 and ds[i + 1] == 0 or ds[i] and ds[i + 1] % ds[i] == 0
    prod = 1
    for k, d in enumerate(ds, start=1):
        prod *= d
        assert minor_gcd(a, k) == abs(prod)


@given(matrices())
def test_hnf_invariants(a):
    h, u = hermite_normal_form(a)
    assert is_hnf(h) and u @ a == h and abs(u.det()) == 1


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p
    assert (p - p).is_zero()


@given(polys())
def test_format_parse_identity(p):
    assert parse_poly(format_poly(p), CTX) == p


@given(polys(), polys())
def test_derivative_is_a_derivation(p, q):
    assert (p * q).diff("x") == p.diff("x") * q + p * q.diff("x")


@given(st.lists(polys(max_terms=3, max_deg=2), min_size=1, max_size=3))
def test_generators_reduce_to_zero(gens):
    G = groebner(gens, CTX)
    assert all(G.normal_form(g).is_zero() for g in gens)
    assert G.is_reduced()


@given(st.lists(polys(max_terms=3, max_deg=2), min_size=1, max_size=2), polys(max_terms=3, max_deg=2))
def test_ideal_contains_combinations(gens, h):
    I = IdealBasis(CTX, gens)
    assert I.contains(gens[0] * h + gens[-1])


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2).filter(any))
def test_depth_bounded_by_row_height(row):
    H = TorusSubgroup.from_rows(2, [row])
    d = subgroup_depth(H, 3)
    assert d is not None and d <= max(abs(x) for x in row)


@given(st.integers(0, 10**6))
def test_exp_derivation_rules(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(1, 2)
    atoms = [f"X{i}" for i in range(1, n + 1)] + [f"exp(X{i})" for i in range(1, n + 1)]

    def rand():
        ts = []
        for _ in range(rng.randint(1, 3)):
            mono = "*".join(rng.choice(atoms) for _ in range(rng.randint(0, 2))) or "1"
            ts.append(f"{rng.randint(1, 4)}*{mono}")
        return kh.ExpPoly.parse(" + ".join(ts), n)

    f, g = rand(), rand()
    i = rng.randint(1, n)
    d = kh.exp_derive
    assert d(f * g, i) == d(f, i) * g + f * d(g, i)
    assert d(f ** 2, i) == (f * d(f, i)).scale(2)
