import random

import pytest

from expfield import efield as ef
from expfield.corpus import counterexample_presentation, presentations
from expfield.formats import parse_ef
from expfield.poly import RatPoly, format_poly

PRES = dict(presentations())


def test_declared_data_consistent():
    for name, F in PRES.items():
        assert F.violations() == [], name


def test_exp_power_two_four():
    F = PRES["two-four"]
    k, (num, den) = F.exp_power(F.coordinates(F.element("3*a")))
    assert k == 1 and format_poly(num) == "8" and format_poly(den) == "1"


def test_exp_on_half_needs_root():
    F = PRES["two-four"]
    k, _ = F.exp_power(F.coordinates(F.element("1/2*a")))
    assert k == 2


def test_inconsistent_presentation_flagged():
    with pytest.raises(ef.EFieldError, match="homomorphism"):
        parse_ef("gens: a\ndspan: a\nexp: a -> 2\nexp: 2*a -> 5\n")
    with pytest.raises(ef.EFieldError, match="homomorphism"):
        parse_ef("gens: a, b\ndspan: a\ndspan: b\nexp: a -> 2\nexp: b -> 3\nexp: a + b -> 7\n")


def test_transcendence_degree():
    F = PRES["algebraic"]
    assert F.td([F.var("a"), F.var("s")]) == 1
    assert PRES["independent"].td([PRES["independent"].var("a"), PRES["independent"].var("b")]) == 2


@pytest.mark.parametrize("name,tuple_,delta", [
    ("fixed-point", ["a"], 0),
    ("two-four", ["a"], 0),
    ("independent", ["a"], 1),
    ("algebraic", ["a"], 0),
    ("kernel-line", ["k"], 0),
])
def test_delta(name, tuple_, delta):
    F = PRES[name]
    assert ef.predim_delta(F, F.tuple(*tuple_)) == delta


def test_counterexample_values():
    C = counterexample_presentation()
    t = C.tuple("t", "r*t", "r^2*t")
    assert ef.predim_delta(C, t) == -1
    assert ef.predim_Delta(C, t, C.kernel_base()) == 0
    assert ef.td_over(C, [C.var("t"), C.var("r")], []) == 2


def test_strong_and_not_strong():
    C = counterexample_presentation()
    v = ef.check_strong(C, C.empty(), [C.tuple("t", "r*t", "r^2*t")])
    assert v.status == "not-strong" and v.value == -1
    good = ef.check_strong(PRES["independent"], PRES["independent"].empty(), [PRES["independent"].tuple("a")])
    assert good.holds
    assert ef.check_strong(C, C.empty(), []).status == "vacuously-strong-over-probes"


def test_semistrong_over_kernel():
    C = counterexample_presentation()
    v = ef.check_semistrong(C, C.kernel_base(), [C.tuple("t", "r*t", "r^2*t")])
    assert v.holds, v.to_json()


def _random_presentation(rng):
    k = rng.randint(1, 3)
    gens = [f"g{i}" for i in range(1, 2 * k + 1)]
    lines = [f"gens: {', '.join(gens)}"]
    for i in range(k):
        lines.append(f"dspan: g{i + 1}")
    for i in range(k):
        if rng.random() < 0.5:
            lines.append(f"exp: g{i + 1} -> g{k + i + 1}")
        else:
            lines.append(f"exp: g{i + 1} -> g{rng.randint(1, k)}")
    return parse_ef("\n".join(lines) + "\n"), gens[:k]


@pytest.mark.parametrize("seed", range(20))
def test_addition_property(seed):
    rng = random.Random(seed)
    F, ds = _random_presentation(rng)
    x = F.tuple(*rng.sample(ds, rng.randint(1, len(ds))))
    y = F.tuple(*rng.sample(ds, rng.randint(1, len(ds))))
    assert ef.check_addition_property(F, x, y)


def test_with_roots_is_coherent():
    F = PRES["kernel-line"].with_roots(4)
    assert F.violations() == []
    z4 = F.zeta(4)
    assert F.is_zero(z4 * z4 - F.zeta(2))


def test_zeta6_by_crt():
    F = PRES["kernel-line"].with_roots(6)
    z6 = F.zeta(6)
    assert F.is_zero(z6 ** 6 - 1)
    assert not F.is_zero(z6 ** 2 - 1) and not F.is_zero(z6 ** 3 - 1)


def test_coherent_root_oracle_adds_symbols():
    F = PRES["fixed-point"]
    sys_ = ef.coherent_root_oracle(F, F.var("a"), 2)
    assert sys_.symbols == ["rho2"]
    assert [format_poly(r) for r in sys_.relations] == ["rho2^2 - a"]


def test_ela_exponentiate_step():
    G, rec = ef.ela_step(PRES["independent"], ef.Exponentiate("b"))
    assert rec.case == 2 and rec.delta == 0
    assert G.violations() == []


def test_ela_logarithm_step():
    G, rec = ef.ela_step(PRES["algebraic"], ef.Logarithm("s + 1"))
    assert rec.to_json()["tag"] == "logarithm" and rec.delta == 0
    assert G.violations() == []


def test_ela_algebraic_step():
    G, rec = ef.ela_step(PRES["empty"], ef.Algebraic("s^2 - c"))
    assert rec.td_increment == 0 and "s" in G.gens


def test_kernel_extend_rejects_old_kernel():
    F = PRES["kernel-line"]
    with pytest.raises(ef.KernelMismatchError):
        ef.kernel_extend(F, [F.element("2*k")], [{2: 0}], 2)


def test_kernel_extend_new_generator():
    F = parse_ef("gens: k, u, v\ndspan: k\nexp: k -> 1\nkernel: 1\ntau: 1\n")
    G1 = ef.kernel_extend(F, [F.var("u"), F.element("v + k")], [{2: 1, 3: 0}, {2: 0, 3: 2}], 3)
    assert G1.violations() == []
    assert G1.is_zero(ef.exp_values(G1, G1.tuple("1/2*u"))[0][1][0] + 1)
    with pytest.raises(ef.KernelMismatchError):
        ef.kernel_extend(F, [F.var("u"), F.element("u + k")], [{2: 1, 3: 0}, {2: 1, 3: 0}], 3)


def test_residue_table_checked():
    F = parse_ef("gens: k, u\ndspan: k\nexp: k -> 1\nkernel: 1\ntau: 1\n")
    with pytest.raises(ef.PurityError):
        ef.kernel_extend(F, [F.var("u")], [{2: 1, 3: 0, 4: 0}], 4)
    with pytest.raises(ef.PurityError):
        ef.kernel_extend(F, [F.var("u")], [{2: 1}], 3)


def test_canonical_round_trip():
    for name, F in PRES.items():
        assert parse_ef(F.canonical()).canonical() == F.canonical(), name


def test_exp_values_outside_graph():
    F = PRES["independent"]
    with pytest.raises(ef.EFieldError):
        ef.exp_values(F, F.tuple("b"))


def test_evaluate_at_homogenises():
    F = PRES["two-four"]
    vals = dict(zip(["X", "E"], ef.exp_values(F, F.tuple("a"))[0]))
    ctx = F.ctx.extend(["X", "E"])
    p = RatPoly.var(ctx, "E") ** 2 - 4
    assert ef.evaluate_at(F, p, vals).is_zero()


def test_etd_upper_bound():
    b = ef.etd_upper(PRES["independent"], PRES["independent"].tuple("a"))
    assert b.value == 1
