from fractions import Fraction

import pytest

from expfield.formats import parse_mv
from expfield.linalg import IntMat
from expfield.poly import format_poly
from expfield.torus import (
    TorusError,
    TorusSubgroup,
    atypical_witness,
    intersect_subgroup,
    monomial_image,
    subgroup_depth,
)


def mv(text):
    return parse_mv(text)


def test_subgroup_dim_and_text():
    H = TorusSubgroup.from_rows(2, [[2, -1]])
    assert H.dim == 1
    assert H.describe() == "y1^2 = y2"
    assert H.contains_point([Fraction(3), Fraction(9)])
    assert not H.contains_point([Fraction(3), Fraction(8)])


@pytest.mark.parametrize("rows,depth", [([[1, 0]], 1), ([[2, -1]], 2), ([[3, 1]], 3), ([[2, 0]], 2),
                                        ([[1, 0], [0, 1]], 1), ([[2, 0], [0, 2]], 2)])
def test_depth(rows, depth):
    assert subgroup_depth(TorusSubgroup.from_rows(2, rows), 5) == depth


def test_depth_respects_cap():
    assert subgroup_depth(TorusSubgroup.from_rows(2, [[3, 1]]), 2) is None


def test_depth_of_whole_torus_is_undefined():
    with pytest.raises(TorusError):
        subgroup_depth(TorusSubgroup.from_rows(2, []), 3)


def test_monomial_image_of_coset():
    W = mv("n: 2\ny1^2 - y2\n")
    img = monomial_image(W, IntMat.from_rows([[2, -1]]))
    assert img.dim == 0
    assert [format_poly(g) for g in img.generators()] == ["y1 - 1"]


def test_intersection_dimension():
    W = mv("n: 2\ny1 + y2 - 1\n")
    X = intersect_subgroup(W, TorusSubgroup.from_rows(2, [[1, -1]]))
    assert X.dim == 0


def test_point_is_atypical_with_square_witness():
    rep = atypical_witness(mv("n: 2\ny1 - 2\ny2 - 4\n"), 2)
    assert rep.verdict == "witnesses-found"
    texts = [w.subgroup.describe() for w in rep.witnesses]
    assert "y1^2 = y2" in texts
    assert all(w.recheck(2) for w in rep.witnesses)


@pytest.mark.parametrize("text", ["n: 2\n", "n: 2\ny1 + y2 - 1\n"])
def test_typical_varieties(text):
    assert atypical_witness(mv(text), 3).verdict == "none-up-to-depth"


def test_coset_is_its_own_witness():
    rep = atypical_witness(mv("n: 2\ny1^2 - y2\n"), 2)
    # the identity also meets W, in dimension 0 > 1 + 0 - 2
    assert [w.subgroup.describe() for w in rep.witnesses] == ["y1^2 = y2", "y1 = 1, y2 = 1"]


def test_empty_variety_rejected():
    with pytest.raises(TorusError):
        atypical_witness(mv("n: 1\ny1 - 1\ny1 - 2\n"), 1)
