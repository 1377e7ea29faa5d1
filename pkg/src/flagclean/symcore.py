"""Exact symbolic substrate: affine-linear forms and monomial maps.

Everything here is exact.  Rationals are :class:`fractions.Fraction`,
exponent matrices are tuples of Python ints, so nothing overflows and
nothing rounds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy

from .errors import (CoefficientObstruction, DimensionMismatch,
                     MissingParameter, NonInvertible)

__all__ = [
    "ParamSpace", "LinearForm", "MonomialMap", "ExponentVector",
    "as_rational", "compose", "invert", "pullback_exponents",
    "normalize_form", "evaluate", "is_integral", "parse_form",
]


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: an integrality decision on a rounded value is
    meaningless.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ParamSpace:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate parameter names in {self.names}")

    def __iter__(self):
        return iter(self.names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.names

    def index(self, name):
        return self.names.index(name)


class LinearForm:
    """Affine-linear form ``sum(c_p * p) + constant`` with rational data.

    Zero coefficients are never stored, so two forms are equal exactly when
    their stored data agree.
    """

    __slots__ = ("_coeffs", "_constant", "_hash")

    def __init__(self, coeffs: Mapping[str, object] | None = None, constant=0):
        items = {}
        for name, c in (coeffs or {}).items():
            c = as_rational(c)
            if c:
                items[name] = c
        self._coeffs = dict(sorted(items.items()))
        self._constant = as_rational(constant)
        self._hash = None

    @classmethod
    def var(cls, name: str) -> "LinearForm":
        return cls({name: 1})

    @classmethod
    def const(cls, value) -> "LinearForm":
        return cls({}, value)

    @property
    def coeffs(self) -> dict[str, Fraction]:
        return dict(self._coeffs)

    @property
    def constant(self) -> Fraction:
        return self._constant

    def coefficient(self, name: str) -> Fraction:
        return self._coeffs.get(name, Fraction(0))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self._coeffs)

    def is_constant(self) -> bool:
        return not self._coeffs

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self._coeffs == other._coeffs and self._constant == other._constant

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self._coeffs.items()), self._constant))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, LinearForm):
            other = LinearForm.const(other)
        coeffs = dict(self._coeffs)
        for k, v in other._coeffs.items():
            coeffs[k] = coeffs.get(k, 0) + v
        return LinearForm(coeffs, self._constant + other._constant)

    __radd__ = __add__

    def __neg__(self):
        return LinearForm({k: -v for k, v in self._coeffs.items()}, -self._constant)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LinearForm) else -as_rational(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, LinearForm):
            return NotImplemented
        s = as_rational(scalar)
        return LinearForm({k: s * v for k, v in self._coeffs.items()}, s * self._constant)

    __rmul__ = __mul__

    def substitute(self, assignment: Mapping[str, object]) -> "LinearForm":
        """Replace the parameters named in ``assignment`` by their values."""
        coeffs = {}
        constant = self._constant
        for name, c in self._coeffs.items():
            if name in assignment:
                constant += c * as_rational(assignment[name])
            else:
                coeffs[name] = c
        return LinearForm(coeffs, constant)

    def format(self, order: Iterable[str] | None = None) -> str:
        """Render as e.g. ``mu_-1 + 2*mu_0 + Lambda + 3*kappa``."""
        names = list(order) if order is not None else []
        names += sorted(n for n in self._coeffs if n not in names)
        parts = []
        for name in names:
            c = self._coeffs.get(name)
            if c is None:
                continue
            mag = abs(c)
            term = name if mag == 1 else f"{format_rational(mag)}*{name}"
            parts.append(("-" if c < 0 else "+", term))
        if self._constant or not parts:
            parts.append(("-" if self._constant < 0 else "+", format_rational(abs(self._constant))))
        sign, first = parts[0]
        out = ("-" + first) if sign == "-" else first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LinearForm({self.format()!r})"


_NUMBER = re.compile(r"\d+(?:/\d+)?")


def parse_form(text: str, params: Sequence[str]) -> LinearForm:
    """Parse ``"-mu_-1 - 2*mu_0 + 1/2"`` style text over the given names.

    Parameter names may contain ``-`` (``mu_-1``), so names are matched
    longest-first against the declared list rather than by a generic
    identifier pattern.
    """
    names = sorted(params, key=len, reverse=True)
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty linear form")
    pos = 0
    coeffs: dict[str, Fraction] = {}
    constant = Fraction(0)
    first = True
    while pos < len(s):
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif not first:
            raise ValueError(f"expected '+' or '-' at offset {pos} in {text!r}")
        first = False
        factor = Fraction(sign)
        m = _NUMBER.match(s, pos)
        had_number = False
        if m:
            factor *= Fraction(m.group())
            pos = m.end()
            had_number = True
            if pos < len(s) and s[pos] == "*":
                pos += 1
            elif pos == len(s) or s[pos] in "+-":
                constant += factor
                continue
        name = next((n for n in names if s.startswith(n, pos)), None)
        if name is None:
            what = "parameter name" if had_number else "number or parameter name"
            raise ValueError(f"expected {what} at offset {pos} in {text!r}")
        pos += len(name)
        m = re.compile(r"/(\d+)").match(s, pos)
        if m:  # "Lambda/3"
            if int(m.group(1)) == 0:
                raise ValueError(f"division by zero at offset {pos} in {text!r}")
            factor /= int(m.group(1))
            pos = m.end()
        coeffs[name] = coeffs.get(name, 0) + factor
    return LinearForm(coeffs, constant)


def normalize_form(form: LinearForm, order: Sequence[str] | None = None) -> LinearForm:
    """Canonical representative of ``{+-form + n : n integer}``.

    The first nonzero coefficient in ``order`` is made positive and the
    constant is reduced into [0, 1).
    """
    names = list(order) if order is not None else []
    names += sorted(n for n in form.variables if n not in names)
    lead = next((form.coefficient(n) for n in names if form.coefficient(n)), None)
    if lead is not None and lead < 0:
        form = -form
    c = form.constant
    return LinearForm(form.coeffs, c - (c.numerator // c.denominator))


def evaluate(form: LinearForm, assignment: Mapping[str, object]) -> Fraction:
    missing = form.variables - set(assignment)
    if missing:
        raise MissingParameter(missing)
    return form.substitute(assignment).constant


def is_integral(form: LinearForm, assignment: Mapping[str, object]) -> bool:
    return evaluate(form, assignment).denominator == 1


@dataclass(frozen=True)
class ExponentVector:
    base: tuple[LinearForm, ...]
    fiber: tuple[LinearForm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fiber", tuple(self.fiber))

    @property
    def flat(self) -> tuple[LinearForm, ...]:
        return self.base + self.fiber

    def substitute(self, assignment) -> "ExponentVector":
        return ExponentVector(tuple(f.substitute(assignment) for f in self.base),
                              tuple(f.substitute(assignment) for f in self.fiber))


def _int_matrix(rows) -> tuple[tuple[int, ...], ...]:
    out = []
    for row in rows:
        r = []
        for e in row:
            if isinstance(e, bool) or not isinstance(e, int):
                # sympy / numpy integers are accepted, floats are not
                if hasattr(e, "__index__"):
                    e = e.__index__()
                else:
                    raise TypeError(f"exponent {e!r} is not an integer")
            r.append(int(e))
        out.append(tuple(r))
    return tuple(out)


def int_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


@dataclass(frozen=True)
class MonomialMap:
    """Torus morphism ``z -> (c_j * prod_i z_i**E[j][i])_j``."""

    coeffs: tuple[Fraction, ...]
    exponents: tuple[tuple[int, ...], ...]
    source_dim: int

    def __init__(self, coeffs, exponents, source_dim: int | None = None):
        exps = _int_matrix(exponents)
        cs = tuple(as_rational(c) for c in coeffs)
        if source_dim is None:
            if not exps:
                raise DimensionMismatch("source_dim is required for a map with no outputs")
            source_dim = len(exps[0])
        if len(cs) != len(exps):
            raise DimensionMismatch(f"{len(cs)} coefficients for {len(exps)} exponent rows")
        if any(len(r) != source_dim for r in exps):
            raise DimensionMismatch("exponent rows must all have length source_dim")
        if any(c == 0 for c in cs):
            raise ValueError("monomial map coefficients must be nonzero")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "source_dim", int(source_dim))

    @property
    def target_dim(self) -> int:
        return len(self.exponents)

    @classmethod
    def identity(cls, n: int) -> "MonomialMap":
        return cls([1] * n, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=1) -> "MonomialMap":
        """Single-output map ``c * z**exponents``."""
        return cls([coeff], [list(exponents)], len(exponents))

    def is_identity(self) -> bool:
        return self == MonomialMap.identity(self.source_dim)

    def det(self) -> int:
        if self.source_dim != self.target_dim:
            raise DimensionMismatch("determinant of a non-square exponent matrix")
        return int_det(self.exponents)

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        """Evaluate at a point of the torus (nonzero rationals)."""
        if len(point) != self.source_dim:
            raise DimensionMismatch(f"point has {len(point)} coordinates, map expects {self.source_dim}")
        pt = [as_rational(p) for p in point]
        out = []
        for c, row in zip(self.coeffs, self.exponents):
            val = c
            for z, e in zip(pt, row):
                val *= z ** e
            out.append(val)
        return tuple(out)

    def format(self, source: Sequence[str], target: Sequence[str] | None = None) -> str:
        """Human form like ``(x, y) -> (1/x, y/x^2)``."""
        return f"({', '.join(source)}) -> ({', '.join(monomial_str(c, r, source) for c, r in zip(self.coeffs, self.exponents))})"


def monomial_str(coeff: Fraction, row: Sequence[int], names: Sequence[str]) -> str:
    def power(n, e):
        return n if e == 1 else f"{n}^{e}"

    num = [power(n, e) for n, e in zip(names, row) if e > 0]
    den = [power(n, -e) for n, e in zip(names, row) if e < 0]
    c = Fraction(coeff)
    head = "-" if c < 0 else ""
    c = abs(c)
    num_c = [str(c.numerator)] if c.numerator != 1 or not num else []
    top = "*".join(num_c + num) or "1"
    bottom = den + ([str(c.denominator)] if c.denominator != 1 else [])
    if not bottom:
        return head + top
    b = "*".join(bottom)
    return f"{head}{top}/{b if len(bottom) == 1 else '(' + b + ')'}"


def compose(f: MonomialMap, g: MonomialMap) -> MonomialMap:
    """``f o g``: apply ``g`` first."""
    if g.target_dim != f.source_dim:
        raise DimensionMismatch(f"cannot compose: inner map has {g.target_dim} outputs, "
                                f"outer map expects {f.source_dim}")
    n = g.source_dim
    exps = []
    coeffs = []
    for c, row in zip(f.coeffs, f.exponents):
        new_row = [sum(row[k] * g.exponents[k][i] for k in range(len(row))) for i in range(n)]
        val = c
        for k, e in enumerate(row):
            val *= g.coeffs[k] ** e
        exps.append(new_row)
        coeffs.append(val)
    return MonomialMap(coeffs, exps, n)


def invert(f: MonomialMap) -> MonomialMap:
    if f.source_dim != f.target_dim:
        raise NonInvertible(f"{f.target_dim}x{f.source_dim} exponent matrix is not square")
    d = f.det()
    if d not in (1, -1):
        raise NonInvertible(f"exponent matrix has determinant {d}")
    n = f.source_dim
    if n == 0:
        return f
    adj = sympy.Matrix(f.exponents).adjugate()
    inv = [[int(adj[i, j]) * d for j in range(n)] for i in range(n)]
    # z_k = d_k * prod_j w_j**F[k][j] with w = f(z) forces d_k = prod_j c_j**(-F[k][j]).
    coeffs = []
    for row in inv:
        val = Fraction(1)
        for c, e in zip(f.coeffs, row):
            val *= c ** (-e)
        coeffs.append(val)
    result = MonomialMap(coeffs, inv, n)
    if not compose(f, result).is_identity():
        raise CoefficientObstruction("inverse coefficients do not close up")
    return result


def pullback_exponents(f: MonomialMap, exponents: Sequence) -> tuple:
    """Exponents of ``f^*`` of the rank-one system with the given exponents.

    ``result[i] = sum_j E[j][i] * exponents[j]``; coefficients of ``f`` do not
    enter since constant rescalings leave monodromy unchanged.
    """
    if len(exponents) != f.target_dim:
        raise DimensionMismatch(f"{len(exponents)} exponents for a map with {f.target_dim} outputs")
    out = []
    for i in range(f.source_dim):
        acc = LinearForm() if any(isinstance(x, LinearForm) for x in exponents) else Fraction(0)
        for j, lam in enumerate(exponents):
            e = f.exponents[j][i]
            if e:
                acc = acc + lam * e
        out.append(acc)
    return tuple(out)
