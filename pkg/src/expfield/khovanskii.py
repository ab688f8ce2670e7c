"""Exponential polynomials p(X, e^X), formal derivatives, Khovanskii systems
and verification of exponential-algebraicity certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .efield import EFieldError, EFieldPresentation, ElementTuple, evaluate_at, exp_values
from .formula import Eq, Formula, Neq, conj
from .poly import RatPoly, VarContext, format_poly, parse_poly


class KhovanskiiError(ValueError):
    pass


def exp_context(n: int, coeffs: Sequence[str] = ()) -> VarContext:
    """X1..Xn, then E1..En standing for e^(X1)..e^(Xn), then coefficient names."""
    xs = tuple(f"X{i}" for i in range(1, n + 1))
    es = tuple(f"E{i}" for i in range(1, n + 1))
    return VarContext(xs + es + tuple(coeffs),
                      ("additive",) * n + ("multiplicative",) * n + ("parameter",) * len(coeffs))


class ExpPoly:
    """f(X) = p(X, e^X) with p a polynomial over Q(coefficients)."""

    __slots__ = ("n", "body")

    def __init__(self, n: int, body: RatPoly):
        names = body.ctx.names
        if names[: 2 * n] != exp_context(n).names:
            raise KhovanskiiError(f"context must start with X1..X{n}, E1..E{n}")
        self.n = n
        self.body = body

    @classmethod
    def parse(cls, text: str, n: int, coeffs: Sequence[str] = (), *, line: int = 1, col: int = 1,
              source: str | None = None) -> ExpPoly:
        ctx = exp_context(n, coeffs)
        exp_map = {f"X{i}": f"E{i}" for i in range(1, n + 1)}
        return cls(n, parse_poly(text, ctx, exp_map=exp_map, line=line, col=col, source=source))

    @classmethod
    def const(cls, n: int, c, coeffs: Sequence[str] = ()) -> ExpPoly:
        return cls(n, RatPoly.const(exp_context(n, coeffs), c))

    @property
    def ctx(self) -> VarContext:
        return self.body.ctx

    @property
    def coeffs(self) -> tuple[str, ...]:
        return self.ctx.names[2 * self.n:]

    def _other(self, other) -> RatPoly:
        if isinstance(other, ExpPoly):
            if other.ctx != self.ctx:
                raise KhovanskiiError("exponential polynomials over different contexts")
            return other.body
        return RatPoly.const(self.ctx, other)

    def __add__(self, other):
        return ExpPoly(self.n, self.body + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ExpPoly(self.n, self.body - self._other(other))

    def __rsub__(self, other):
        return ExpPoly(self.n, self._other(other) - self.body)

    def __mul__(self, other):
        return ExpPoly(self.n, self.body * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ExpPoly(self.n, -self.body)

    def __pow__(self, k: int):
        return ExpPoly(self.n, self.body ** k)

    def scale(self, c) -> ExpPoly:
        return ExpPoly(self.n, self.body.scale(Fraction(c)))

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.body == other
        return isinstance(other, ExpPoly) and self.n == other.n and self.body == other.body

    def __hash__(self):
        return hash((self.n, self.body))

    def text(self, namer=None) -> str:
        n = self.n

        def name(v):
            if v.startswith("E") and v[1:].isdigit() and int(v[1:]) <= n:
                arg = f"X{v[1:]}"
                return f"exp({namer(arg) if namer else arg})"
            return namer(v) if namer else v

        return format_poly(self.body, namer=name)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"ExpPoly({self.text()!r})"


def exp_derive(f: ExpPoly, i: int) -> ExpPoly:
    """d f / d X_i with d E_j / d X_i = [i = j] E_j."""
    if not 1 <= i <= f.n:
        raise KhovanskiiError(f"derivative index {i} out of range 1..{f.n}")
    e = RatPoly.var(f.ctx, f"E{i}")
    return ExpPoly(f.n, f.body.diff(f"X{i}") + e * f.body.diff(f"E{i}"))


@dataclass(frozen=True)
class KhovanskiiSystem:
    polys: tuple

    def __post_init__(self):
        w = len(self.polys)
        for f in self.polys:
            if f.n != w:
                raise KhovanskiiError(f"a width-{w} system needs exponential polynomials in {w} variables")
        if len({f.ctx for f in self.polys}) > 1:
            raise KhovanskiiError("all equations must share one coefficient context")

    @property
    def width(self) -> int:
        return len(self.polys)

    @property
    def coeffs(self) -> tuple[str, ...]:
        return self.polys[0].coeffs if self.polys else ()

    def jacobian(self) -> list[list[ExpPoly]]:
        return [[exp_derive(f, j) for j in range(1, self.width + 1)] for f in self.polys]


def _det(rows: list[list[ExpPoly]], n: int, coeffs) -> ExpPoly:
    if not rows:
        return ExpPoly.const(n, 1, coeffs)
    if len(rows) == 1:
        return rows[0][0]
    total = ExpPoly.const(n, 0, coeffs)
    for j, a in enumerate(rows[0]):
        if a.is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * _det(minor, n, coeffs)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_det(S: KhovanskiiSystem) -> ExpPoly:
    """Cofactor expansion of det(d f_i / d X_j)."""
    return _det(S.jacobian(), S.width, S.coeffs)


# ---------------------------------------------------------------- certificates

@dataclass
class CertificateVerdict:
    status: str  # valid | invalid | unverified
    reason: str = ""
    values: list = field(default_factory=list)
    jacobian: str = ""
    jacobian_value: str = ""
    coefficients: tuple = ()

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def __bool__(self):
        return self.valid

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "equation_values": self.values,
            "jacobian": self.jacobian,
            "jacobian_value": self.jacobian_value,
            "coefficients": list(self.coefficients),
        }


def _assignment(F: EFieldPresentation, S: KhovanskiiSystem, point: ElementTuple) -> dict:
    if len(point) != S.width:
        raise KhovanskiiError(f"point has {len(point)} entries, system width is {S.width}")
    for c in S.coeffs:
        if c not in F.ctx:
            raise KhovanskiiError(f"coefficient {c} is not a generator of the presentation")
    for i in range(1, S.width + 1):
        for v in (f"X{i}", f"E{i}"):
            if v in F.ctx:
                raise KhovanskiiError(f"presentation generator {v} clashes with a system variable")
    values = {}
    for i, (a, ea) in enumerate(exp_values(F, point), start=1):
        values[f"X{i}"] = a
        values[f"E{i}"] = ea
    return values


def evaluate(F: EFieldPresentation, f: ExpPoly, values: dict) -> RatPoly:
    return evaluate_at(F, f.body, values)


def verify_certificate(F: EFieldPresentation, S: KhovanskiiSystem, point: ElementTuple,
                       warn_height: int = 1) -> CertificateVerdict:
    """Check that ``point`` solves S in F with nonvanishing Jacobian, which
    makes its first entry exponentially algebraic over the coefficients.

    Vanishing means membership in the relation ideal. If the presentation
    shows undeclared multiplicative relations the verdict is "unverified"."""
    values = _assignment(F, S, point)
    out = CertificateVerdict("invalid", coefficients=S.coeffs)
    for i, f in enumerate(S.polys, start=1):
        v = evaluate(F, f, values)
        out.values.append(format_poly(v))
        if not v.is_zero():
            out.reason = f"equation {i} does not vanish at the point"
            return out
    J = jacobian_det(S)
    out.jacobian = J.text()
    jv = evaluate(F, J, values)
    out.jacobian_value = format_poly(jv)
    if jv.is_zero():
        out.reason = "the Jacobian determinant vanishes at the point"
        return out
    hidden = F.warnings(warn_height)
    if hidden:
        out.status = "unverified"
        out.reason = "presentation has undeclared relations: " + "; ".join(hidden)
        return out
    out.status = "valid"
    return out


def chi_formula(S: KhovanskiiSystem) -> Formula:
    """The conjunction of f_i(x) = 0 and Jacobian(x) != 0, free in x1..xn."""
    n = S.width

    def lower(v):
        return "x" + v[1:] if v.startswith("X") and v[1:].isdigit() else v

    parts = [Eq(f.text(lower)) for f in S.polys]
    if n:
        parts.append(Neq(jacobian_det(S).text(lower)))
    free = tuple((f"x{i}", "field") for i in range(1, n + 1)) + tuple((c, "field") for c in S.coeffs)
    return Formula("chi", free, conj(parts), (f"Khovanskii system of width {n}",))


__all__ = [
    "CertificateVerdict",
    "EFieldError",
    "ExpPoly",
    "KhovanskiiError",
    "KhovanskiiSystem",
    "chi_formula",
    "exp_context",
    "exp_derive",
    "jacobian_det",
    "verify_certificate",
]
