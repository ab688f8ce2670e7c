import os

import pytest

from expfield import axioms as ax
from expfield.corpus import GV_CORPUS, presentations
from expfield.formats import parse_ef, parse_gv
from expfield.formula import check_well_formed, to_text
from expfield.gvariety import PreconditionError
from expfield.poly import parse_poly

PRES = dict(presentations())
CORPUS = {P.name: P for P in GV_CORPUS}
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

SHIFTED = "n: 2\ny1 - x1 - 1\ny2 - x2 - 1\n"
GENERIC = "gens: a1, a2\ndspan: a1\ndspan: a2\nexp: a1 -> a1 + 1\nexp: a2 -> a2 + 1\n"


def test_seac_golden_formula():
    V = CORPUS["shifted-graphs"].variety()
    rot, fr = ax.certify(V, 2, 1)
    f = ax.seac_instance(V, 1, rotundity=rot, freeness=fr, irreducible=True)
    with open(os.path.join(GOLDEN, "seac_n2.txt")) as fh:
        assert to_text(f) == fh.read()


def test_seac_instance_needs_certificates():
    V = CORPUS["shifted-graphs"].variety()
    rot, fr = ax.certify(V, 2, 1)
    with pytest.raises(ax.CertificationError):
        ax.seac_instance(V, 1, rotundity=None, freeness=fr, irreducible=True)
    with pytest.raises(ax.CertificationError):
        ax.seac_instance(V, 1, rotundity=rot, freeness=fr, irreducible=False)
    G2 = CORPUS["G2"].variety()
    rot2, fr2 = ax.certify(G2, 2, 1)
    with pytest.raises(ax.CertificationError):
        ax.seac_instance(G2, 0, rotundity=rot2, freeness=fr2, irreducible=True)


def test_strong_kernel_instance_flags_trivial_case():
    f = ax.strong_kernel_instance(CORPUS["G2"].variety())
    assert any(n.startswith("flag: trivially valid") for n in f.notes)
    assert check_well_formed(f) == []


def test_strong_kernel_witness_square():
    F = PRES["two-four"]
    V = parse_gv("n: 2\nx2 - 2*x1\ny1 - 2\ny2 - 4\n")
    r = ax.check_strong_kernel_witness(F, V, F.tuple("a", "2*a"), 2)
    assert r.verdict == ax.VALID
    q = r.checks[-1].quantities
    assert q["subgroup_text"] == "y1^2 = y2" and q["subgroup_depth"] == 2
    assert r.reverify()


def test_strong_kernel_witness_off_variety():
    F = PRES["two-four"]
    V = parse_gv("n: 2\nx2 - 2*x1\ny1 - 2\ny2 - 4\n")
    r = ax.check_strong_kernel_witness(F, V, F.tuple("a", "a"), 2)
    assert r.verdict == ax.INVALID and r.reason == "point-not-on-variety"


def test_strong_kernel_torsion_needs_depth_two():
    T = PRES["kernel-line-roots"]
    W = parse_gv("n: 1\nparams: k\nx1 - 1/2*k\ny1 + 1\n")
    shallow = ax.check_strong_kernel_witness(T, W, T.tuple("1/2*k"), 1, {"k": "k"})
    deep = ax.check_strong_kernel_witness(T, W, T.tuple("1/2*k"), 2, {"k": "k"})
    assert shallow.verdict == ax.UNDECIDED
    assert deep.verdict == ax.VALID and deep.checks[-1].quantities["subgroup_text"] == "y1^2 = 1"


def test_strong_kernel_parameters_must_be_kernel():
    F = PRES["two-four"]
    W = parse_gv("n: 1\nparams: k\nx1 - k\ny1 - 2\n")
    with pytest.raises(ax.AxiomError):
        ax.check_strong_kernel_witness(F, W, F.tuple("a"), 1, {"k": "a"})


def test_strong_kernel_large_variety_refused():
    F = PRES["two-four"]
    with pytest.raises(PreconditionError):
        ax.check_strong_kernel_witness(F, CORPUS["G2"].variety(), F.tuple("a", "a"), 1)


def test_seac_witness_valid():
    F = parse_ef(GENERIC)
    r = ax.check_seac_witness(F, parse_gv(SHIFTED), F.tuple(), F.tuple("a1", "a2"), 1)
    assert r.verdict == ax.VALID
    assert r.reverify()


def test_seac_witness_dependency_reported_first():
    G = parse_ef("gens: k, a1, a2\nrelation: a1 + a2 - k\nrelation: a1*a2 + a1 + a2\n"
                 "dspan: k\ndspan: a1\nexp: k -> 1\nexp: a1 -> a1 + 1\nexp: a2 -> a2 + 1\nkernel: 1\ntau: 1\n")
    r = ax.check_seac_witness(G, parse_gv(SHIFTED), G.tuple(), G.tuple("a1", "a2"), 1)
    assert r.verdict == ax.INVALID
    assert r.reason.startswith("dependency [1, 1]")
    dep = next(c for c in r.checks if c.name == "Z-dependencies")
    assert dep.quantities["kernel_element"] == "a1 + a2"


def test_eac_witness():
    F = parse_ef(GENERIC)
    V = parse_gv(SHIFTED)
    assert ax.check_eac_witness(F, V, F.tuple("a1", "a2")).verdict == ax.VALID
    assert ax.check_eac_witness(F, V).verdict == ax.NO_WITNESS
    bad = parse_ef("gens: a\ndspan: a\nexp: a -> a\n")
    assert ax.check_eac_witness(bad, V, bad.tuple("a", "a")).verdict == ax.INVALID


def test_report_json_is_stable():
    F = parse_ef(GENERIC)
    V = parse_gv(SHIFTED)
    a = ax.check_seac_witness(F, V, F.tuple(), F.tuple("a1", "a2"), 1).to_json()
    b = ax.check_seac_witness(F, V, F.tuple(), F.tuple("a1", "a2"), 1).to_json()
    assert a == b


def test_pipeline_free_input_needs_no_steps():
    trail = ax.eac_reduction_pipeline(CORPUS["shifted-graphs"].variety(), ax.ReductionConfig(seed=5))
    assert len(trail) == 0


def test_pipeline_cuts_to_dimension_n():
    trail = ax.eac_reduction_pipeline(CORPUS["G2"].variety(), ax.ReductionConfig(seed=5))
    assert [s.tag for s in trail] == ["hyperplane-cut", "hyperplane-cut"]
    assert trail[-1].variety.dim == 2
    assert all(s.certificate.rotund for s in trail)


def test_pipeline_multiplicative_then_additive():
    t = ax.eac_reduction_pipeline(parse_gv("n: 2\ny2 - 2\n"), ax.ReductionConfig(seed=1))
    assert [s.tag for s in t] == ["hyperplane-cut", "multiplicative-reduction"]
    t = ax.eac_reduction_pipeline(parse_gv("n: 2\nx2 - 1\n"), ax.ReductionConfig(seed=1))
    assert [s.tag for s in t] == ["hyperplane-cut", "additive-reduction"]


def test_pipeline_rabinovich_step():
    V = CORPUS["parabola"].variety()
    t = ax.eac_reduction_pipeline(V, ax.ReductionConfig(seed=1, avoid=parse_poly("x1", V.ctx)))
    assert [s.tag for s in t] == ["unit-extension"] and t[-1].variety.dim == V.dim + 1


def test_pipeline_rejects_non_rotund():
    with pytest.raises(PreconditionError):
        ax.eac_reduction_pipeline(CORPUS["diagonal"].variety(), ax.ReductionConfig(seed=1))


def test_pipeline_is_seed_deterministic():
    a = ax.eac_reduction_pipeline(CORPUS["three-fold"].variety(), ax.ReductionConfig(seed=9)).to_json()
    b = ax.eac_reduction_pipeline(CORPUS["three-fold"].variety(), ax.ReductionConfig(seed=9)).to_json()
    assert a == b
