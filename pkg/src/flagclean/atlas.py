"""Monomial atlases: charts, total transitions, cocycle and line-bundle checks.

A chart is an affine space ``A^n`` whose coordinate hyperplanes may lie in
the boundary of the open torus.  Above every chart sits the same fiber
torus (here the T-torsor coordinate and the central G_m coordinate), so a
transition between charts is a monomial map with block form

    [[E, 0],
     [W, I]]

on (base | fiber) exponents.  ``transition(i, j)`` (written Psi_ij) eats
chart-j coordinates and returns chart-i coordinates.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .errors import Diagnostic, DimensionMismatch, Disconnected, ValidationError
from .symcore import (ExponentVector, MonomialMap, ParamSpace, as_rational,
                      compose, invert, monomial_str, pullback_exponents)

ChartId = Hashable

__all__ = [
    "Chart", "FiberSpec", "TotalTransition", "AtlasModel",
    "transition", "transition_along", "verify_cocycles", "CocycleReport",
    "derive_logform_cocycle", "check_linebundle", "LineBundleReport",
    "validate_model",
]


@dataclass(frozen=True)
class Chart:
    id: ChartId
    base_coords: tuple[str, ...]
    divisorial: tuple[bool, ...]
    logpole: tuple[bool, ...]

    def __post_init__(self):
        for name in ("base_coords", "divisorial", "logpole"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def dim(self):
        return len(self.base_coords)

    def form_orders(self) -> tuple[int, ...]:
        """Exponent of each coordinate in the reference top form.

        0 means a log pole (``dx/x``), 1 means a regular ``dx``.  A
        coordinate that is not divisorial is a unit on the chart, so the
        invariant form ``dx/x`` is used there.
        """
        return tuple(0 if (pole or not div) else 1
                     for div, pole in zip(self.divisorial, self.logpole))


@dataclass(frozen=True)
class FiberSpec:
    names: tuple[str, ...] = ()
    central: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self):
        return len(self.names)


@dataclass(frozen=True)
class TotalTransition:
    """Chart-``source`` coordinates to chart-``target`` coordinates."""

    source: ChartId
    target: ChartId
    base: MonomialMap
    fiber_twists: tuple[tuple[int, ...], ...] = ()
    fiber_units: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "fiber_twists", tuple(tuple(int(e) for e in r) for r in self.fiber_twists))
        object.__setattr__(self, "fiber_units", tuple(as_rational(u) for u in self.fiber_units))
        if len(self.fiber_twists) != len(self.fiber_units):
            raise DimensionMismatch("one unit per fiber twist row is required")
        n = self.base.source_dim
        if self.base.target_dim != n:
            raise DimensionMismatch("base transition must be n -> n")
        if any(len(r) != n for r in self.fiber_twists):
            raise DimensionMismatch(f"fiber twist rows must have length {n}")
        if any(u == 0 for u in self.fiber_units):
            raise ValueError("fiber units must be nonzero")

    @property
    def base_dim(self):
        return self.base.source_dim

    @property
    def fiber_dim(self):
        return len(self.fiber_twists)

    def full(self) -> MonomialMap:
        n, k = self.base_dim, self.fiber_dim
        rows = [list(r) + [0] * k for r in self.base.exponents]
        rows += [list(w) + [int(a == b) for b in range(k)] for a, w in enumerate(self.fiber_twists)]
        return MonomialMap(list(self.base.coeffs) + list(self.fiber_units), rows, n + k)

    @classmethod
    def from_full(cls, source, target, full: MonomialMap, base_dim: int) -> "TotalTransition":
        n = base_dim
        k = full.source_dim - n
        ex = full.exponents
        for a in range(n):
            if any(ex[a][n:]):
                raise ValueError("full map does not have block-triangular form")
        for a in range(k):
            if list(ex[n + a][n:]) != [int(a == b) for b in range(k)]:
                raise ValueError("fiber block of full map is not the identity")
        base = MonomialMap(full.coeffs[:n], [r[:n] for r in ex[:n]], n)
        return cls(source, target, base, [r[:n] for r in ex[n:]], full.coeffs[n:])

    def then(self, outer: "TotalTransition") -> "TotalTransition":
        """``outer o self``."""
        if outer.source != self.target:
            raise ValueError(f"cannot chain {self.source}->{self.target} with {outer.source}->{outer.target}")
        return TotalTransition.from_full(self.source, outer.target,
                                         compose(outer.full(), self.full()), self.base_dim)

    def inverse(self) -> "TotalTransition":
        return TotalTransition.from_full(self.target, self.source, invert(self.full()), self.base_dim)

    def is_identity(self) -> bool:
        return self.full().is_identity()

    def same_map(self, other: "TotalTransition") -> bool:
        return self.full() == other.full()

    def format(self, base_names: Sequence[str], fiber_names: Sequence[str] = ()) -> str:
        names = list(base_names) + list(fiber_names)
        full = self.full()
        outs = [monomial_str(c, r, names) for c, r in zip(full.coeffs, full.exponents)]
        return f"({', '.join(names)}) -> ({', '.join(outs)})"


@dataclass(frozen=True, eq=False)
class AtlasModel:
    params: ParamSpace
    charts: tuple[Chart, ...]
    fiber: FiberSpec
    reference: ChartId
    transitions: Mapping[tuple, TotalTransition]
    local_system: ExponentVector
    declared_central_cocycle: Mapping[tuple, MonomialMap] | None = None
    fixtures: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.params, ParamSpace):
            object.__setattr__(self, "params", ParamSpace(tuple(self.params)))
        object.__setattr__(self, "charts", tuple(self.charts))
        object.__setattr__(self, "transitions", dict(self.transitions))
        if self.declared_central_cocycle is not None:
            object.__setattr__(self, "declared_central_cocycle", dict(self.declared_central_cocycle))
        object.__setattr__(self, "fixtures", tuple(self.fixtures))
        problems = validate_model(self)
        if problems:
            raise ValidationError([Diagnostic(p, None, None, m) for p, m in problems])

    def __eq__(self, other):
        if not isinstance(other, AtlasModel):
            return NotImplemented
        return (self.params == other.params and self.charts == other.charts
                and self.fiber == other.fiber and self.reference == other.reference
                and self.transitions == other.transitions
                and self.local_system == other.local_system
                and (self.declared_central_cocycle or {}) == (other.declared_central_cocycle or {})
                and self.fixtures == other.fixtures)

    __hash__ = None

    @property
    def chart_ids(self) -> tuple:
        return tuple(c.id for c in self.charts)

    def chart(self, cid) -> Chart:
        for c in self.charts:
            if c.id == cid:
                return c
        raise KeyError(f"no chart {cid!r}")

    @property
    def base_dim(self) -> int:
        return self.charts[0].dim if self.charts else 0


def _neighbours(model: AtlasModel) -> dict:
    adj = {cid: set() for cid in model.chart_ids}
    for (s, t) in model.transitions:
        if s in adj and t in adj:
            adj[s].add(t)
            adj[t].add(s)
    return adj


def _step(model: AtlasModel, frm, to) -> TotalTransition:
    """Declared transition frm -> to, inverting the reverse one if needed."""
    key = ("step", frm, to)
    if key not in model._cache:
        if (frm, to) in model.transitions:
            step = model.transitions[(frm, to)]
        elif (to, frm) in model.transitions:
            step = model.transitions[(to, frm)].inverse()
        else:
            raise Disconnected(f"no declared transition between charts {frm!r} and {to!r}")
        model._cache[key] = step
    return model._cache[key]


def _path(model: AtlasModel, start, goal) -> list:
    if start not in model.chart_ids or goal not in model.chart_ids:
        raise Disconnected(f"unknown chart in ({start!r}, {goal!r})")
    adj = _neighbours(model)
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for w in sorted(adj[u], key=repr):
            if w not in prev:
                prev[w] = u
                queue.append(w)
    if goal not in prev:
        raise Disconnected(f"charts {start!r} and {goal!r} are not linked by transitions")
    path = [goal]
    while path[-1] != start:
        path.append(prev[path[-1]])
    return path[::-1]


def identity_transition(model: AtlasModel, cid) -> TotalTransition:
    n, k = model.base_dim, len(model.fiber)
    return TotalTransition(cid, cid, MonomialMap.identity(n),
                           [[0] * n for _ in range(k)], [1] * k)


def transition_along(model: AtlasModel, path: Sequence) -> TotalTransition:
    """Compose declared steps along ``path`` (first element is the source chart)."""
    path = list(path)
    if not path:
        raise ValueError("empty path")
    result = identity_transition(model, path[0])
    for a, b in zip(path, path[1:]):
        result = result.then(_step(model, a, b))
    return result


def transition(model: AtlasModel, i, j) -> TotalTransition:
    """Total transition from chart-``j`` to chart-``i`` coordinates."""
    key = ("transition", i, j)
    if key not in model._cache:
        model._cache[key] = transition_along(model, _path(model, j, i))
    return model._cache[key]


@dataclass
class CocycleFailure:
    charts: tuple
    kind: str
    detail: str

    def to_dict(self):
        return {"charts": [str(c) for c in self.charts], "kind": self.kind, "detail": self.detail}


@dataclass
class CocycleReport:
    checked: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self):
        return {"ok": self.ok,
                "checked": [[str(c) for c in t] for t in self.checked],
                "failures": [f.to_dict() for f in self.failures]}


def _declared_pairs(model: AtlasModel) -> set:
    return {frozenset(p) for p in model.transitions if p[0] != p[1]}


def verify_cocycles(model: AtlasModel) -> CocycleReport:
    """Check every redundancy in the declared gluing data.

    Two-cycles (both directions declared) must be mutually inverse; every
    triangle of charts whose three sides are declared must close up as a
    full block map, coefficients included.
    """
    report = CocycleReport()
    names = lambda t: ", ".join(str(c) for c in t)  # noqa: E731
    for (s, t), tr in model.transitions.items():
        if s == t:
            report.checked.append((s,))
            if not tr.is_identity():
                report.failures.append(CocycleFailure((s,), "self", f"transition {s}->{s} is not the identity"))
        elif (t, s) in model.transitions and repr(s) < repr(t):
            report.checked.append((s, t))
            back = model.transitions[(t, s)]
            if not tr.then(back).is_identity():
                report.failures.append(CocycleFailure((s, t), "inverse",
                                                      f"declared {s}->{t} and {t}->{s} are not mutually inverse"))
    pairs = _declared_pairs(model)
    ids = sorted(model.chart_ids, key=repr)
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            for c in range(b + 1, len(ids)):
                i, j, k = ids[a], ids[b], ids[c]
                if not {frozenset((i, j)), frozenset((j, k)), frozenset((i, k))} <= pairs:
                    continue
                report.checked.append((i, j, k))
                direct = _step(model, k, i)
                via = _step(model, k, j).then(_step(model, j, i))
                if not direct.same_map(via):
                    report.failures.append(CocycleFailure(
                        (i, j, k), "triangle",
                        f"Psi_{i}{k} != Psi_{i}{j} o Psi_{j}{k} on triangle ({names((i, j, k))})"))
    return report


def derive_logform_cocycle(model: AtlasModel, i, j) -> MonomialMap:
    """``omega_j / omega_i`` as a monomial in chart-``i`` coordinates.

    ``omega_c`` is the nowhere-vanishing top form on chart ``c`` with log
    poles exactly along the flagged coordinate divisors.  This is the
    transition function of the inverse line bundle, up to a constant.
    """
    ci, cj = model.chart(i), model.chart(j)
    to_j = transition(model, j, i).base  # chart-i coordinates -> chart-j coordinates
    vi, vj = ci.form_orders(), cj.form_orders()
    pulled = pullback_exponents(to_j, [Fraction(v) for v in vj])
    exps = [int(p) - v for p, v in zip(pulled, vi)]
    coeff = Fraction(to_j.det())
    for c, v in zip(to_j.coeffs, vj):
        coeff *= c ** v
    return MonomialMap.monomial(exps, coeff)


@dataclass
class LineBundleEntry:
    pair: tuple
    derived: tuple            # exponents of t_ij^(-1), chart-i coordinates
    declared: tuple | None    # declared t_ij^(-1) exponents, if any
    twist_expected: tuple | None  # central fiber row implied by the derived cocycle
    twist_actual: tuple | None

    @property
    def ok(self) -> bool:
        good = True
        if self.declared is not None:
            good &= self.declared == self.derived
        if self.twist_actual is not None:
            good &= self.twist_actual == self.twist_expected
        return good

    def to_dict(self):
        conv = lambda v: None if v is None else list(v)  # noqa: E731
        return {"pair": [str(c) for c in self.pair], "ok": self.ok,
                "derived_inverse_cocycle": conv(self.derived),
                "declared_inverse_cocycle": conv(self.declared),
                "central_twist_expected": conv(self.twist_expected),
                "central_twist_actual": conv(self.twist_actual)}


@dataclass
class LineBundleReport:
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def mismatches(self) -> list:
        return [e for e in self.entries if not e.ok]

    def to_dict(self):
        return {"ok": self.ok, "entries": [e.to_dict() for e in self.entries]}


def check_linebundle(model: AtlasModel) -> LineBundleReport:
    """Compare derived log-form cocycles with declared line-bundle data.

    For each pair (i, j) the derived ``t_ij^(-1)`` must equal any declared
    one exactly in its exponents, and the central fiber row of
    ``transition(i, j)`` must be ``t_ij = 1/t_ij^(-1)`` rewritten in chart-j
    coordinates.  Constants are never compared.
    """
    pairs = {(t, s) for (s, t) in model.transitions if s != t}
    pairs |= set(model.declared_central_cocycle or {})
    report = LineBundleReport()
    central = model.fiber.central
    for i, j in sorted(pairs, key=repr):
        derived = derive_logform_cocycle(model, i, j).exponents[0]
        declared = None
        if model.declared_central_cocycle and (i, j) in model.declared_central_cocycle:
            declared = model.declared_central_cocycle[(i, j)].exponents[0]
        expected = actual = None
        if central is not None:
            tr = transition(model, i, j)
            expected = tuple(int(e) for e in pullback_exponents(tr.base, [-Fraction(d) for d in derived]))
            actual = tr.fiber_twists[model.fiber.names.index(central)]
        report.entries.append(LineBundleEntry((i, j), tuple(derived), declared, expected, actual))
    return report


def validate_model(model: AtlasModel) -> list[tuple[str, str]]:
    """All invariant violations as ``(field path, message)`` pairs."""
    problems = []
    ids = [c.id for c in model.charts]
    if not model.charts:
        return [("charts", "at least one chart is required")]
    if len(set(ids)) != len(ids):
        problems.append(("charts", "chart ids must be unique"))
    n = model.charts[0].dim
    base_names = set()
    for idx, c in enumerate(model.charts):
        p = f"charts[{idx}]"
        if c.dim != n:
            problems.append((f"{p}.coords", f"chart {c.id!r} has dimension {c.dim}, expected {n}"))
        if len(c.divisorial) != c.dim:
            problems.append((f"{p}.divisorial", "one divisorial flag per coordinate is required"))
        if len(c.logpole) != c.dim:
            problems.append((f"{p}.logpole", "one logpole flag per coordinate is required"))
        if len(set(c.base_coords)) != c.dim:
            problems.append((f"{p}.coords", "coordinate names must be distinct"))
        for k, (d, lp) in enumerate(zip(c.divisorial, c.logpole)):
            if lp and not d:
                problems.append((f"{p}.logpole[{k}]", "a log pole requires a divisorial coordinate"))
        base_names |= set(c.base_coords)
    clash = base_names & set(model.fiber.names)
    if clash:
        problems.append(("fiber", f"fiber names clash with base coordinates: {sorted(clash)}"))
    if len(set(model.fiber.names)) != len(model.fiber.names):
        problems.append(("fiber", "fiber names must be distinct"))
    if model.fiber.central is not None and model.fiber.central not in model.fiber.names:
        problems.append(("fiber.central", f"{model.fiber.central!r} is not a fiber coordinate"))
    if model.reference not in ids:
        problems.append(("reference", f"reference chart {model.reference!r} does not exist"))
    k = len(model.fiber)
    for (s, t), tr in model.transitions.items():
        p = f"transitions[{s}->{t}]"
        if s not in ids or t not in ids:
            problems.append((p, "transition refers to an unknown chart"))
        if (tr.source, tr.target) != (s, t):
            problems.append((p, "transition key does not match its source/target"))
        if tr.base_dim != n:
            problems.append((f"{p}.exponents", f"base map must be {n}x{n}"))
            continue
        if tr.fiber_dim != k:
            problems.append((f"{p}.fiber_twists", f"expected {k} fiber rows, got {tr.fiber_dim}"))
        d = tr.base.det()
        if d not in (1, -1):
            problems.append((f"{p}.exponents", f"transition {s}->{t} is not unimodular (det {d})"))
    if not problems and model.reference in ids:
        adj = _neighbours(model)
        seen = {model.reference}
        stack = [model.reference]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        missing = [c for c in ids if c not in seen]
        if missing:
            problems.append(("transitions", f"charts not linked to the reference: {missing}"))
    ls = model.local_system
    if len(ls.base) != n:
        problems.append(("local_system.base", f"expected {n} exponents, got {len(ls.base)}"))
    if len(ls.fiber) != k:
        problems.append(("local_system.fiber", f"expected {k} exponents, got {len(ls.fiber)}"))
    for part in ("base", "fiber"):
        for idx, f in enumerate(getattr(ls, part)):
            unknown = f.variables - set(model.params.names)
            if unknown:
                problems.append((f"local_system.{part}[{idx}]", f"undeclared parameter(s) {sorted(unknown)}"))
    for (i, j), m in (model.declared_central_cocycle or {}).items():
        p = f"central_cocycle[{i}->{j}]"
        if i not in ids or j not in ids:
            problems.append((p, "refers to an unknown chart"))
        if m.target_dim != 1 or m.source_dim != n:
            problems.append((p, f"must be a single monomial in {n} variables"))
    return problems
