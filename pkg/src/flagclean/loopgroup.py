"""Truncated Laurent series and 2x2 loop matrices over rational function fields.

A :class:`LaurentSeries` knows its coefficients exactly below its
``precision`` and nothing at or above it.  Coefficients live in a sympy
fraction field over QQ in the chart variables; sympy keeps them reduced,
so zero-testing is exact.  Membership in the Iwahori subgroup ``I`` and
its pro-unipotent radical ``I^u`` is decided over the localization at
whatever denominators show up, and those denominators are reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)
from sympy.polys.fields import FracField

from .errors import NonUnitDeterminant

__all__ = [
    "coefficient_field", "LaurentSeries", "LoopMatrix", "MembershipVerdict",
    "in_iwahori", "in_iwahori_unipotent", "coset_equal", "Fixture",
    "verify_fixtures", "FixtureReport", "DEFAULT_PRECISION",
]

DEFAULT_PRECISION = 8
T = sympy.Symbol("t")


@lru_cache(maxsize=None)
def coefficient_field(names: tuple[str, ...] = ()) -> FracField:
    # a field needs at least one generator; the dummy is never used in data
    return FracField(tuple(names) or ("_u",), QQ)


class LaurentSeries:
    """``sum_k c_k t^k`` known exactly for ``k < precision``."""

    __slots__ = ("field", "terms", "precision")

    def __init__(self, field: FracField, terms: Mapping[int, object], precision: int):
        self.field = field
        self.precision = int(precision)
        clean = {}
        for k, c in terms.items():
            k = int(k)
            if k >= self.precision:
                continue
            c = c if hasattr(c, "numer") else field.field_new(c)
            if c:
                clean[k] = c
        self.terms = clean

    @classmethod
    def zero(cls, field, precision):
        return cls(field, {}, precision)

    @classmethod
    def constant(cls, field, value, precision):
        return cls(field, {0: value}, precision)

    @property
    def valuation(self) -> int:
        """Lowest power with nonzero coefficient; ``precision`` if none is known."""
        return min(self.terms, default=self.precision)

    @property
    def coefficients(self) -> list:
        v = self.valuation
        return [self.coeff(k) for k in range(v, self.precision)]

    def coeff(self, k: int):
        if k >= self.precision:
            raise ValueError(f"coefficient of t^{k} is beyond precision {self.precision}")
        return self.terms.get(k, self.field.zero)

    def is_known(self, k: int) -> bool:
        return k < self.precision

    def __add__(self, other):
        prec = min(self.precision, other.precision)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, self.field.zero) + c
        return LaurentSeries(self.field, terms, prec)

    def __neg__(self):
        return LaurentSeries(self.field, {k: -c for k, c in self.terms.items()}, self.precision)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            c = other if hasattr(other, "numer") else self.field.field_new(other)
            return LaurentSeries(self.field, {k: c * v for k, v in self.terms.items()}, self.precision)
        prec = min(self.precision + other.valuation, other.precision + self.valuation)
        terms = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                if i + j < prec:
                    terms[i + j] = terms.get(i + j, self.field.zero) + a * b
        return LaurentSeries(self.field, terms, prec)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        """Inverse of a series whose leading coefficient is nonzero."""
        if not self.terms:
            raise NonUnitDeterminant("series is zero to working precision")
        v = self.valuation
        rel = self.precision - v
        a = [self.coeff(v + k) for k in range(rel)]
        inv0 = 1 / a[0]
        b = [inv0]
        for k in range(1, rel):
            acc = self.field.zero
            for j in range(1, k + 1):
                acc += a[j] * b[k - j]
            b.append(-inv0 * acc)
        return LaurentSeries(self.field, {k - v: c for k, c in enumerate(b)}, self.precision - 2 * v)

    def equals_to_precision(self, other) -> bool:
        prec = min(self.precision, other.precision)
        keys = {k for k in set(self.terms) | set(other.terms) if k < prec}
        return all(self.terms.get(k, self.field.zero) == other.terms.get(k, self.field.zero) for k in keys)

    def denominators(self) -> set:
        return {c.denom for c in self.terms.values() if not c.denom.is_ground}

    def to_expr(self):
        return sum((c.as_expr() * T ** k for k, c in sorted(self.terms.items())), sympy.Integer(0))

    def __repr__(self):
        return f"LaurentSeries({self.to_expr()} + O(t^{self.precision}))"


def _parse_entry(text, names: Sequence[str]):
    local = {n: sympy.Symbol(n) for n in names}
    local["t"] = T
    if isinstance(text, (int,)):
        return sympy.Integer(text)
    return parse_expr(str(text), local_dict=local,
                      transformations=standard_transformations + (convert_xor,), evaluate=True)


def laurent_from_expr(expr, field: FracField, precision: int) -> LaurentSeries:
    """Expand an expression rational in ``t`` with rational-function coefficients.

    Laurent polynomials are read off directly; anything else is written as
    numerator over denominator and the denominator series is inverted.
    """
    try:
        return _laurent_polynomial(expr, field, precision)
    except ValueError:
        num, den = sympy.fraction(sympy.together(expr))
        if not den.has(T):
            raise
    # numerator and denominator are exact, so any precision past their degree is honest
    deg = lambda p: int(sympy.degree(sympy.expand(p * T**_shift(p)), T)) - _shift(p)  # noqa: E731
    n_exact = _laurent_polynomial(num, field, deg(num) + 1)
    d_exact = _laurent_polynomial(den, field, deg(den) + 1)
    if not d_exact.terms:
        raise ValueError(f"denominator of {expr} vanishes")
    if not n_exact.terms:
        return LaurentSeries.zero(field, precision)
    v, vn = d_exact.valuation, n_exact.valuation
    # product precision is min(N_num - v, N_den - 2v + vn); make both reach ``precision``
    n = _laurent_polynomial(num, field, max(deg(num) + 1, precision + v))
    d = _laurent_polynomial(den, field, max(deg(den) + 1, precision + 2 * v - vn))
    q = n * d.inverse()
    return LaurentSeries(field, q.terms, precision)


def _shift(p):
    """Power of t that clears negative exponents in ``p``."""
    lows = [t.as_coeff_exponent(T)[1] for t in sympy.Add.make_args(sympy.expand(p))]
    return max(0, -int(min(lows))) if lows else 0


def _laurent_polynomial(expr, field, precision):
    terms = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        c, k = term.as_coeff_exponent(T)
        if c.has(T) or not k.is_integer:
            raise ValueError(f"{expr} is not a Laurent polynomial in t")
        k = int(k)
        terms[k] = terms.get(k, field.zero) + field.from_expr(c)
    return LaurentSeries(field, terms, precision)


class LoopMatrix:
    """2x2 matrix of Laurent series; ``det_claim=1`` marks an SL2 element."""

    __slots__ = ("entries", "det_claim", "field")

    def __init__(self, entries, det_claim=None):
        self.entries = tuple(tuple(row) for row in entries)
        if len(self.entries) != 2 or any(len(r) != 2 for r in self.entries):
            raise ValueError("a loop matrix is 2x2")
        self.field = self.entries[0][0].field
        self.det_claim = det_claim

    @classmethod
    def from_exprs(cls, rows, variables: Sequence[str] = (), precision: int = DEFAULT_PRECISION,
                   det_claim=1) -> "LoopMatrix":
        """Build from strings/sympy expressions in ``t`` and the variables."""
        field = coefficient_field(tuple(variables))
        entries = [[laurent_from_expr(_parse_entry(e, variables) if not isinstance(e, sympy.Basic) else e,
                                      field, precision) for e in row] for row in rows]
        g = cls(entries, det_claim)
        if det_claim == 1:
            one = LaurentSeries.constant(field, 1, precision)
            if not g.det().equals_to_precision(one):
                raise NonUnitDeterminant(f"determinant of {g.to_exprs()} is not 1")
        return g

    @classmethod
    def identity(cls, field, precision=DEFAULT_PRECISION):
        one = LaurentSeries.constant(field, 1, precision)
        zero = LaurentSeries.zero(field, precision)
        return cls([[one, zero], [zero, one]], 1)

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    @property
    def precision(self) -> int:
        return min(e.precision for row in self.entries for e in row)

    def det(self) -> LaurentSeries:
        return self[0, 0] * self[1, 1] - self[0, 1] * self[1, 0]

    def __matmul__(self, other):
        return multiply(self, other)

    def inverse(self):
        return inverse(self)

    def equals_to_precision(self, other) -> bool:
        return all(self[r, c].equals_to_precision(other[r, c]) for r in range(2) for c in range(2))

    def denominators(self) -> set:
        out = set()
        for row in self.entries:
            for e in row:
                out |= e.denominators()
        return out

    def to_exprs(self):
        return [[self[r, c].to_expr() for c in range(2)] for r in range(2)]

    def __repr__(self):
        return f"LoopMatrix({self.to_exprs()}, prec={self.precision})"


def multiply(g1: LoopMatrix, g2: LoopMatrix) -> LoopMatrix:
    rows = [[g1[r, 0] * g2[0, c] + g1[r, 1] * g2[1, c] for c in range(2)] for r in range(2)]
    claim = g1.det_claim * g2.det_claim if (g1.det_claim is not None and g2.det_claim is not None) else None
    return LoopMatrix(rows, claim)


def inverse(g: LoopMatrix) -> LoopMatrix:
    adj = [[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]
    if g.det_claim == 1:
        return LoopMatrix(adj, 1)
    d = g.det()
    if not d.terms:
        raise NonUnitDeterminant("determinant vanishes to working precision")
    dinv = d.inverse()
    return LoopMatrix([[e * dinv for e in row] for row in adj], None)


@dataclass
class MembershipVerdict:
    status: str                       # "yes" | "no" | "insufficient_precision"
    certificate: tuple | None = None  # for "no": ("entry", row, col, power) or ("det", power)
    denominators_used: frozenset = frozenset()
    quotient: LoopMatrix | None = field(default=None, repr=False)
    precision: int | None = None

    @property
    def yes(self) -> bool:
        return self.status == "yes"

    def to_dict(self):
        return {"status": self.status,
                "certificate": list(self.certificate) if self.certificate else None,
                "denominators_used": sorted(self.denominators_used),
                "precision": self.precision}


def _membership(g: LoopMatrix, unipotent: bool) -> MembershipVerdict:
    dens = frozenset(str(d.as_expr()) for d in g.denominators())
    prec = g.precision

    def no(cert):
        return MembershipVerdict("no", cert, dens, precision=prec)

    for r in range(2):
        for c in range(2):
            e = g[r, c]
            for k in sorted(e.terms):
                if k < 0:
                    return no(("entry", r + 1, c + 1, k))
    required = [(1, 0, 0, None)]
    if unipotent:
        required += [(0, 0, 0, 1), (1, 1, 0, 1)]
    for r, c, k, target in required:
        e = g[r, c]
        if e.is_known(k):
            val = e.coeff(k)
            if (target is None and val) or (target is not None and val != target):
                return no(("entry", r + 1, c + 1, k))
    d = g.det()
    for k in sorted(d.terms):
        if (k == 0 and d.terms[k] != 1) or k != 0:
            return no(("det", k))
    if d.is_known(0) and d.coeff(0) != 1:
        return no(("det", 0))
    entries_known = all(g[r, c].is_known(-1) for r in range(2) for c in range(2))
    if not entries_known or prec < 1:
        return MembershipVerdict("insufficient_precision", None, dens, precision=prec)
    return MembershipVerdict("yes", None, dens, precision=prec)


def in_iwahori(g: LoopMatrix) -> MembershipVerdict:
    """Entries in R[[t]], lower-left divisible by t, determinant 1."""
    return _membership(g, unipotent=False)


def in_iwahori_unipotent(g: LoopMatrix) -> MembershipVerdict:
    """Membership in I with diagonal entries congruent to 1 mod t."""
    return _membership(g, unipotent=True)


SUBGROUPS = {"I": in_iwahori, "Iu": in_iwahori_unipotent}


def coset_equal(g1: LoopMatrix, g2: LoopMatrix, subgroup: str = "I") -> MembershipVerdict:
    """Decide ``g1 K == g2 K`` for ``K`` in {I, I^u}.

    The quotient ``h = g2^{-1} g1`` (so ``g1 = g2 h``) is tested; it is kept on
    the verdict.  Reported denominators include those of the inputs.
    """
    if subgroup not in SUBGROUPS:
        raise ValueError(f"unknown subgroup {subgroup!r}; expected one of {sorted(SUBGROUPS)}")
    for g in (g1, g2):
        if g.det_claim != 1:
            raise NonUnitDeterminant("coset comparison needs determinant-one matrices")
    h = multiply(inverse(g2), g1)
    verdict = SUBGROUPS[subgroup](h)
    extra = frozenset(str(d.as_expr()) for d in g1.denominators() | g2.denominators())
    verdict.denominators_used = verdict.denominators_used | extra
    verdict.quotient = h
    return verdict


@dataclass(frozen=True)
class Fixture:
    """An exact coset identity ``g1 K == g2 K`` with its expected verdict."""

    name: str
    variables: tuple[str, ...]
    g1: tuple
    g2: tuple
    subgroup: str = "I"
    expected: str = "yes"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        norm = lambda m: tuple(tuple(str(e) for e in row) for row in m)  # noqa: E731
        object.__setattr__(self, "g1", norm(self.g1))
        object.__setattr__(self, "g2", norm(self.g2))
        if self.subgroup not in SUBGROUPS:
            raise ValueError(f"unknown subgroup {self.subgroup!r}")
        if self.expected not in ("yes", "no"):
            raise ValueError("expected must be 'yes' or 'no'")

    def matrices(self, precision: int = DEFAULT_PRECISION):
        return (LoopMatrix.from_exprs(self.g1, self.variables, precision),
                LoopMatrix.from_exprs(self.g2, self.variables, precision))

    def decide(self, precision: int = DEFAULT_PRECISION) -> MembershipVerdict:
        """Coset verdict, retrying once at twice the precision if needed."""
        verdict = coset_equal(*self.matrices(precision), self.subgroup)
        if verdict.status == "insufficient_precision":
            verdict = coset_equal(*self.matrices(2 * precision), self.subgroup)
        return verdict


@dataclass
class FixtureReport:
    results: list = field(default_factory=list)  # (Fixture, MembershipVerdict)

    @property
    def ok(self) -> bool:
        return all(v.status == f.expected for f, v in self.results)

    def to_dict(self):
        return {"ok": self.ok, "fixtures": [
            {"name": f.name, "subgroup": f.subgroup, "expected": f.expected,
             "pass": v.status == f.expected, **v.to_dict()} for f, v in self.results]}


def verify_fixtures(fixtures: Sequence[Fixture], precision: int = DEFAULT_PRECISION) -> FixtureReport:
    report = FixtureReport()
    for fx in fixtures:
        report.results.append((fx, fx.decide(precision)))
    return report
