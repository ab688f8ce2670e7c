import pytest

from expfield import formula as fm
from expfield.axioms import seac_instance, certify, strong_kernel_instance
from expfield.corpus import GV_CORPUS
from expfield.formats import parse_gv


def sample():
    body = fm.Quant("forall", "ker", ("k",), fm.Implies(
        fm.InKer("k"),
        fm.exists("field", ["x"], fm.conj([fm.ExpAtom("x", "k + 1"), fm.Neq("x"),
                                             fm.Annot("note", ("x",), "side condition")]))))
    return fm.Formula("demo", (("c", "field"),), body, ("a note",))


def test_round_trip():
    f = sample()
    text = fm.to_text(f)
    assert fm.to_text(fm.parse_formula(text)) == text
    assert fm.parse_formula(text) == f


def test_well_formed_and_free():
    f = sample()
    assert fm.check_well_formed(f) == []
    assert fm.free_variables(f.body) == set()


def test_undeclared_variable_reported():
    f = fm.Formula("bad", (), fm.Eq("x + 1"))
    assert fm.check_well_formed(f)


def test_bad_sort_rejected():
    with pytest.raises(fm.FormulaError):
        fm.Quant("forall", "reals", ("x",), fm.TRUE)


def test_conj_disj_edge_cases():
    assert fm.conj([]) == fm.TRUE
    assert fm.disj([]) == fm.FALSE
    assert fm.conj([fm.Eq("x")]) == fm.Eq("x")
    assert fm.forall("field", [], fm.TRUE) == fm.TRUE


def test_strong_kernel_instance_shape():
    V = parse_gv("n: 1\nparams: k\nx1 - k\n")
    f = strong_kernel_instance(V)
    assert fm.check_well_formed(f) == []
    text = fm.to_text(f)
    assert text.startswith('(formula "strong-kernel"')
    assert "(forall-ker (k)" in text and "in-atyp" in text


def test_seac_instance_round_trips():
    V = next(P for P in GV_CORPUS if P.name == "shifted-graphs").variety()
    rot, fr = certify(V, 2, 1)
    f = seac_instance(V, 1, rotundity=rot, freeness=fr, irreducible=True)
    assert fm.check_well_formed(f) == []
    assert fm.parse_formula(fm.to_text(f)) == f
