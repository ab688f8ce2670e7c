import random

import pytest

from expfield import linalg
from expfield.linalg import IntMat, hermite_normal_form, minor_gcd, smith_normal_form
from oracles import sympy_snf_invariants


def rand_mat(rng, rows, cols, bound=20):
    return IntMat.from_rows([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])


def test_from_rows_rejects_ragged():
    with pytest.raises(ValueError):
        IntMat.from_rows([[1, 2], [3]])


def test_matmul_and_det():
    a = IntMat.from_rows([[2, 1], [1, 1]])
    assert (a @ IntMat.identity(2)) == a
    assert a.det() == 1
    assert IntMat.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]]).det() == -3


def test_hnf_small():
    h, u = hermite_normal_form(IntMat.from_rows([[4, 6], [2, 2]]))
    assert linalg.is_hnf(h)
    assert (u @ IntMat.from_rows([[4, 6], [2, 2]])) == h
    assert abs(u.det()) == 1
    assert h.to_rows() == [[2, 0], [0, 2]]


def test_snf_known():
    D, U, V = smith_normal_form(IntMat.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]))
    assert [D[i, i] for i in range(3)] == [2, 6, 12]


@pytest.mark.parametrize("seed", range(40))
def test_snf_matches_sympy(seed):
    rng = random.Random(seed)
    a = rand_mat(rng, rng.randint(1, 4), rng.randint(1, 4))
    D, U, V = smith_normal_form(a)
    assert U @ a @ V == D
    ds = [D[i, i] for i in range(min(a.rows, a.cols)) if D[i, i]]
    assert ds == sympy_snf_invariants(a.to_rows())


def test_minor_gcd_is_product_of_invariants():
    a = IntMat.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [minor_gcd(a, k) for k in (1, 2, 3)] == [2, 12, 144]


def test_rational_tools():
    assert linalg.rational_rank([[1, 2], [2, 4]]) == 1
    assert linalg.nullspace([[1, 2]], 2) == [(2, -1)]
    assert linalg.q_linear_relations([[1, 0], [0, 1], [1, 1]]) == [(1, 1, -1)]
    assert linalg.solve_rational([[1, 0], [0, 2]], [3, 1]) == [3, 1 / 2]
    assert linalg.solve_rational([[1, 1]], [1, 0]) is None
    assert linalg.primitive([2, -4, 6]) == (1, -2, 3)
    assert linalg.primitive([-1, 2]) == (1, -2)


def test_integer_kernel_and_solve():
    a = IntMat.from_rows([[2], [4]])
    k = linalg.integer_kernel(a)
    assert k.rows == 1 and (k @ a) == IntMat.zero(1, 1)
    assert linalg.solve_integer(IntMat.from_rows([[2, 0], [0, 3]]), [4, 9]) == (2, 3)
    assert linalg.solve_integer(IntMat.from_rows([[2, 0]]), [1, 0]) is None


def test_saturated_hnf_is_canonical():
    a = linalg.saturated_hnf(IntMat.from_rows([[2, 4]]))
    b = linalg.saturated_hnf(IntMat.from_rows([[-1, -2]]))
    assert a == b == IntMat.from_rows([[1, 2]])


def test_enumerate_canonical_matrices_counts():
    # rational lines through primitive vectors of height 1 in Q^2: (1,0), (0,1), (1,1), (1,-1)
    lines = [m for m in linalg.enumerate_canonical_matrices(2, 1, 1) if m.rows == 1]
    assert len(lines) == 4
    assert all(linalg.is_hnf(m) for m in lines)


def test_integer_vectors_sign_normalised():
    vs = list(linalg.integer_vectors(2, 1))
    assert len(vs) == 4
    assert all(next(x for x in v if x) > 0 for v in vs)


def test_snf_terminates_when_pivot_divides_row():
    # used to cycle: the extended gcd swapped in a column the pivot already divided
    a = IntMat.from_rows([[-16, -4, 3, -19], [-5, 1, -1, -16], [9, -14, -16, 1], [-11, -17, -13, 5],
                          [-12, -10, 4, -20]])
    D, U, V = smith_normal_form(a)
    assert U @ a @ V == D
    assert [D[i, i] for i in range(4)] == [1, 1, 1, 1]
