"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so no
overflow is possible. Matrices are immutable :class:`IntMat` values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class IntMat:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"IntMat expects {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMat:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(v) for r in rows for v in r))

    @classmethod
    def identity(cls, n: int) -> IntMat:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> IntMat:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> IntMat:
        return IntMat.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def __matmul__(self, other: IntMat) -> IntMat:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = [
            [sum(self[i, k] * other[k, j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return IntMat.from_rows(out, cols=other.cols)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.to_rows())

    def height(self) -> int:
        return max((abs(v) for v in self.entries), default=0)

    def __str__(self) -> str:
        return "[" + "; ".join(",".join(str(v) for v in self.row(i)) for i in range(self.rows)) + "]"


def bareiss_det(a: list[list[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_normal_form(a: IntMat) -> tuple[IntMat, IntMat]:
    """Row-style HNF: returns (H, U) with U unimodular and U @ A == H.

    H is in row echelon form; pivots are positive, entries above a pivot lie in
    [0, pivot), and zero rows sit at the bottom.
    """
    m, n = a.rows, a.cols
    h = a.to_rows()
    u = IntMat.identity(m).to_rows()
    r = 0
    for c in range(n):
        if r == m:
            break
        # Euclid down the column until only row r is nonzero.
        for i in range(r + 1, m):
            if h[i][c] == 0:
                continue
            g, s, t = _xgcd(h[r][c], h[i][c])
            p, q = h[r][c] // g, h[i][c] // g
            h[r], h[i] = (
                [s * x + t * y for x, y in zip(h[r], h[i])],
                [-q * x + p * y for x, y in zip(h[r], h[i])],
            )
            u[r], u[i] = (
                [s * x + t * y for x, y in zip(u[r], u[i])],
                [-q * x + p * y for x, y in zip(u[r], u[i])],
            )
        piv = h[r][c]
        if piv == 0:
            continue
        if piv < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
            piv = -piv
        for i in range(r):
            q = h[i][c] // piv
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return IntMat.from_rows(h, cols=n), IntMat.from_rows(u, cols=m)


def smith_normal_form(a: IntMat) -> tuple[IntMat, IntMat, IntMat]:
    """Return (D, U, V) with U @ A @ V == D diagonal and d1 | d2 | ..."""
    m, n = a.rows, a.cols
    d = a.to_rows()
    u = IntMat.identity(m).to_rows()
    v = IntMat.identity(n).to_rows()

    def col_op(i, j, s, t, p, q):
        # columns i, j <- s*ci + t*cj, p*ci + q*cj (over d and v)
        for mat in (d, v):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = s * x + t * y, p * x + q * y

    def row_op(i, j, s, t, p, q):
        for mat in (d, u):
            x, y = mat[i], mat[j]
            mat[i] = [s * a_ + t * b_ for a_, b_ in zip(x, y)]
            mat[j] = [p * a_ + q * b_ for a_, b_ in zip(x, y)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for mat in (d, v):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    for k in range(min(m, n)):
        # choose smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(k, m):
            for j in range(k, n):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(k, best[0])
        swap_cols(k, best[1])
        while True:
            done = True
            for i in range(k + 1, m):
                if d[i][k] and d[i][k] % d[k][k] == 0:
                    row_op(k, i, 1, 0, -(d[i][k] // d[k][k]), 1)
                elif d[i][k]:
                    g, s, t = _xgcd(d[k][k], d[i][k])
                    p, q = d[k][k] // g, d[i][k] // g
                    row_op(k, i, s, t, -q, p)
            for j in range(k + 1, n):
                if d[k][j] and d[k][j] % d[k][k] == 0:
                    # exact multiple: clearing it leaves column k alone
                    col_op(k, j, 1, 0, -(d[k][j] // d[k][k]), 1)
                elif d[k][j]:
                    g, s, t = _xgcd(d[k][k], d[k][j])
                    p, q = d[k][k] // g, d[k][j] // g
                    col_op(k, j, s, t, -q, p)
                    done = False
            if any(d[i][k] for i in range(k + 1, m)):
                continue
            if not done:
                continue
            # divisibility: fold any non-multiple into row k and repeat
            bad = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if d[i][j] % d[k][k]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(k, bad, 1, 1, 0, 1)
        if d[k][k] < 0:
            d[k] = [-x for x in d[k]]
            u[k] = [-x for x in u[k]]
    return (
        IntMat.from_rows(d, cols=n),
        IntMat.from_rows(u, cols=m),
        IntMat.from_rows(v, cols=n),
    )


def rational_rref(rows: Sequence[Sequence[Fraction | int]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    return len(rational_rref(rows)[1])


def int_rank(a: IntMat) -> int:
    return rational_rank(a.to_rows())


def primitive(vec: Sequence[Fraction | int]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector whose first nonzero entry is positive."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def nullspace(rows: Sequence[Sequence[Fraction | int]], ncols: int) -> list[tuple[int, ...]]:
    """Basis of {c : rows @ c == 0}, as primitive integer vectors."""
    red, pivots = rational_rref(rows) if rows else ([], [])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in zip(red, pivots):
            vec[p] = -r[f]
        basis.append(primitive(vec))
    return basis


def q_linear_relations(vectors: Sequence[Sequence[Fraction | int]]) -> list[tuple[int, ...]]:
    """Basis of the space of c with sum(c_i * v_i) == 0.

    ``len(vectors) - len(result)`` is the Q-linear dimension of the family.
    """
    k = len(vectors)
    if k == 0:
        return []
    dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise ValueError("vectors must share a length")
    # columns are the vectors
    rows = [[vectors[i][j] for i in range(k)] for j in range(dim)]
    return nullspace(rows, k)


def solve_rational(vectors: Sequence[Sequence[Fraction | int]], target: Sequence[Fraction | int]
                   ) -> list[Fraction] | None:
    """Some c with sum(c_i * v_i) == target, or None."""
    k = len(vectors)
    dim = len(target)
    if k == 0:
        return [] if all(x == 0 for x in target) else None
    rows = [[vectors[i][j] for i in range(k)] + [target[j]] for j in range(dim)]
    red, pivots = rational_rref(rows)
    if k in pivots:
        return None
    c = [Fraction(0)] * k
    for r, piv in zip(red, pivots):
        c[piv] = r[k]
    return c


def ldim(vectors: Sequence[Sequence[Fraction | int]]) -> int:
    return len(vectors) - len(q_linear_relations(vectors))


def integer_kernel(a: IntMat) -> IntMat:
    """Z-basis (as rows) of the lattice {c in Z^rows : c @ A == 0}."""
    h, u = hermite_normal_form(a)
    zero_rows = [i for i in range(h.rows) if not any(h.row(i))]
    return IntMat.from_rows([u.row(i) for i in zero_rows], cols=a.rows)


def solve_integer(a: IntMat, b: Sequence[int]) -> tuple[int, ...] | None:
    """Find integer c with c @ A == b, or None if no integer solution exists."""
    h, u = hermite_normal_form(a)
    w = [0] * a.rows
    target = list(b)
    if len(target) != a.cols:
        raise ValueError("right-hand side length mismatch")
    for i in range(h.rows):
        row = h.row(i)
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            break
        if target[piv] % row[piv]:
            return None
        w[i] = target[piv] // row[piv]
        target = [t - w[i] * x for t, x in zip(target, row)]
    if any(target):
        return None
    return tuple(sum(w[i] * u[i, j] for i in range(a.rows)) for j in range(a.rows))


def saturated_hnf(a: IntMat) -> IntMat:
    """HNF basis of the lattice (Q-row space of A) ∩ Z^n; canonical per rational row space."""
    red, _ = rational_rref(a.to_rows())
    if not red:
        return IntMat.zero(0, a.cols)
    # the saturated lattice is the integer annihilator of the orthogonal complement
    comp = nullspace(red, a.cols)
    if not comp:
        return IntMat.identity(a.cols)
    lat = integer_kernel(IntMat.from_rows(comp).transpose())
    h, _ = hermite_normal_form(lat)
    nz = [h.row(i) for i in range(h.rows) if any(h.row(i))]
    return IntMat.from_rows(nz, cols=a.cols)


def is_hnf(h: IntMat) -> bool:
    last = -1
    seen_zero = False
    for i in range(h.rows):
        row = h.row(i)
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            seen_zero = True
            continue
        if seen_zero or piv <= last or row[piv] < 0:
            return False
        for k in range(i):
            if not 0 <= h[k, piv] < row[piv]:
                return False
        last = piv
    return True


def _primitive_vectors(n: int, height: int) -> list[tuple[int, ...]]:
    vecs = []
    for v in itertools.product(range(-height, height + 1), repeat=n):
        if not any(v):
            continue
        if primitive(v) == v:
            vecs.append(v)
    return vecs


def enumerate_canonical_matrices(n: int, rank_min: int, height: int) -> Iterator[IntMat]:
    """One saturated-HNF representative per rational row space spanned by
    integer vectors of height <= ``height``, for ranks rank_min..n.

    Order is lexicographic on (rank, HNF entries).
    """
    if not 1 <= rank_min <= n or height < 1:
        raise ValueError("need 1 <= rank_min <= n and height >= 1")
    vecs = _primitive_vectors(n, height)
    for r in range(rank_min, n + 1):
        if r == n:
            yield IntMat.identity(n)
            continue
        seen: set[tuple[int, ...]] = set()
        found: list[IntMat] = []
        for combo in itertools.combinations(vecs, r):
            m = IntMat.from_rows(combo, cols=n)
            if int_rank(m) != r:
                continue
            key = tuple(Fraction(x) for row in rational_rref(m.to_rows())[0] for x in row)
            if key in seen:
                continue
            seen.add(key)
            found.append(saturated_hnf(m))
        found.sort(key=lambda mat: mat.entries)
        yield from found


def minor_gcd(a: IntMat, k: int) -> int:
    """gcd of all k x k minors (independent oracle for Smith invariants)."""
    g = 0
    for rs in itertools.combinations(range(a.rows), k):
        for cs in itertools.combinations(range(a.cols), k):
            g = gcd(g, bareiss_det([[a[i, j] for j in cs] for i in rs]))
    return g


def integer_vectors(n: int, height: int) -> Iterable[tuple[int, ...]]:
    """Nonzero integer vectors of height <= height with positive first nonzero entry."""
    for v in itertools.product(range(-height, height + 1), repeat=n):
        if any(v) and next(x for x in v if x) > 0:
            yield v
