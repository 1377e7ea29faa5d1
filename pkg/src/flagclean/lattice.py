"""Brute-force simplicity oracle on the weight lattice.

Push the rank-one system ``x_1^{m_1} ... x_n^{m_n}`` on the torus forward to
affine n-space.  Its sections have the basis ``e_w = x^{m+w}``, ``w`` in Z^n;
the coordinate ``x_i`` moves ``e_w`` to ``e_{w+e_i}`` and the derivative
``d_i`` moves it to ``-(m_i + w_i) e_{w-e_i}``.  The basis vectors are joint
eigenvectors of the Euler operators with distinct eigenvalues, so every
submodule is spanned by basis vectors and the module is simple iff the
directed "move" graph on Z^n is strongly connected.

The graph is examined on the window ``{-B..B}^n``.  Once the window contains
every lattice point where a coefficient can vanish (plus margin), blocked
edges inside it are exactly the blocked hyperplanes of the infinite graph,
so the finite answer equals the infinite one.  The oracle works on plain
rationals and never looks at linear forms.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import WindowTooSmall
from .symcore import as_rational, format_rational

__all__ = [
    "coefficient", "required_window", "is_simple", "is_clean_oracle",
    "submodule_support", "eigenvalue_tuples", "oracle_vs_criterion",
    "rational_grid", "oracle_grid", "OracleReport", "GridReport",
]

DEFAULT_WINDOW = 16


def coefficient(mu_i, w_i) -> Fraction:
    """Coefficient of the lowering move ``w -> w - e_i`` along axis i."""
    return -(as_rational(mu_i) + w_i)


def required_window(mu: Sequence) -> int:
    return 2 + max((abs(round(as_rational(m))) for m in mu), default=0)


def _check_window(mu, window):
    need = required_window(mu)
    if window < need:
        raise WindowTooSmall(window, need)


@lru_cache(maxsize=None)
def _graph(mu: tuple, window: int) -> csr_matrix:
    n = len(mu)
    side = 2 * window + 1
    shape = (side,) * n
    size = side ** n
    idx = np.arange(size).reshape(shape)
    src, dst = [], []
    values = np.arange(-window, window + 1)
    for i, m in enumerate(mu):
        stride = side ** (n - 1 - i)
        # exact decision per lattice value; numpy only carries the indices
        lower_ok = np.array([coefficient(m, int(v)) != 0 for v in values])
        ax = [np.newaxis] * n
        ax[i] = slice(None)
        w_i = values[tuple(ax)]
        up = np.broadcast_to(w_i < window, shape)
        src.append(idx[up])
        dst.append(idx[up] + stride)
        down = np.broadcast_to((w_i > -window) & lower_ok[tuple(ax)], shape)
        src.append(idx[down])
        dst.append(idx[down] - stride)
    src = np.concatenate(src) if src else np.zeros(0, dtype=int)
    dst = np.concatenate(dst) if dst else np.zeros(0, dtype=int)
    return csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))


@lru_cache(maxsize=None)
def _simple(mu: tuple, window: int) -> bool:
    graph = _graph(mu, window)
    ncomp, _ = connected_components(graph, directed=True, connection="strong")
    return ncomp == 1


def is_simple(mu: Sequence, window: int = DEFAULT_WINDOW) -> bool:
    mu = tuple(as_rational(m) for m in mu)
    _check_window(mu, window)
    return _simple(mu, window)


def is_clean_oracle(mu: Sequence, window: int = DEFAULT_WINDOW) -> bool:
    """Clean iff the pushforward is simple for both ``mu`` and ``-mu`` (duality)."""
    mu = tuple(as_rational(m) for m in mu)
    return is_simple(mu, window) and is_simple(tuple(-m for m in mu), window)


def submodule_support(mu: Sequence, start: Sequence[int], window: int = DEFAULT_WINDOW) -> frozenset:
    """Lattice points spanning the submodule generated by ``e_start``."""
    mu = tuple(as_rational(m) for m in mu)
    _check_window(mu, window)
    start = tuple(int(s) for s in start)
    if len(start) != len(mu) or any(abs(s) > window for s in start):
        raise ValueError(f"start {start} lies outside the window {{-{window}..{window}}}^{len(mu)}")
    side = 2 * window + 1
    shape = (side,) * len(mu)
    root = int(np.ravel_multi_index(tuple(s + window for s in start), shape)) if mu else 0
    order = breadth_first_order(_graph(mu, window), root, directed=True, return_predecessors=False)
    coords = np.unravel_index(order, shape)
    return frozenset(tuple(int(c[k]) - window for c in coords) for k in range(len(order)))


def eigenvalue_tuples(mu: Sequence, window: int) -> list:
    """Joint Euler eigenvalues ``mu + w`` of the basis vectors in the window."""
    mu = tuple(as_rational(m) for m in mu)
    rng = range(-window, window + 1)
    return [tuple(m + w for m, w in zip(mu, ws)) for ws in itertools.product(rng, repeat=len(mu))]


@dataclass
class OracleReport:
    charts: list = field(default_factory=list)   # (chart id, base exponents, oracle bit)
    oracle_clean: bool = True
    criterion_clean: bool = True
    window: int = DEFAULT_WINDOW

    @property
    def agree(self) -> bool:
        return self.oracle_clean == self.criterion_clean

    def to_dict(self):
        return {"agree": self.agree, "oracle_clean": self.oracle_clean,
                "criterion_clean": self.criterion_clean, "window": self.window,
                "charts": [{"chart": str(c), "exponents": [format_rational(v) for v in e], "clean": b}
                           for c, e, b in self.charts]}


def _chart_values(model, assignment):
    from .cleanness import chart_exponents
    from .symcore import evaluate

    out = []
    for chart in model.charts:
        exps = chart_exponents(model, chart.id).base
        vals = [evaluate(f, assignment) for f, d in zip(exps, chart.divisorial) if d]
        out.append((chart.id, vals))
    return out


def model_window(model, assignment: Mapping, minimum: int = DEFAULT_WINDOW) -> int:
    """Smallest admissible window that is at least ``minimum``."""
    vals = [v for _, vs in _chart_values(model, assignment) for v in vs]
    return max(minimum, required_window(vals))


def oracle_vs_criterion(model, assignment: Mapping, window: int = DEFAULT_WINDOW) -> OracleReport:
    from .cleanness import evaluate_clean

    verdict = evaluate_clean(model, assignment)
    report = OracleReport(criterion_clean=verdict.clean, window=window)
    for cid, vals in _chart_values(model, assignment):
        bit = is_clean_oracle(vals, window)
        report.charts.append((cid, vals, bit))
    report.oracle_clean = all(b for _, _, b in report.charts)
    return report


def rational_grid(denominator_bound: int, value_range) -> list[Fraction]:
    """Sorted rationals ``p/q`` with ``q <= denominator_bound`` in ``[-R, R]``."""
    r = as_rational(value_range)
    vals = set()
    for q in range(1, denominator_bound + 1):
        lo = -(r * q).__floor__()
        for p in range(lo, (r * q).__floor__() + 1):
            vals.add(Fraction(p, q))
    return sorted(v for v in vals if -r <= v <= r)


def grid_assignments(names: Sequence[str], values: Sequence[Fraction], limit: int | None, seed: int = 0):
    """Deterministic sample (without replacement) of the full product grid."""
    k = len(values)
    total = k ** len(names)
    if limit is None or limit >= total:
        picks = range(total)
    else:
        picks = sorted(random.Random(seed).sample(range(total), limit))
    for code in picks:
        digits = []
        for _ in names:
            code, d = divmod(code, k)
            digits.append(values[d])
        yield dict(zip(names, reversed(digits)))


@dataclass
class GridReport:
    total_grid: int
    cases: int = 0
    agreements: int = 0
    clean_cases: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.cases if self.cases else 1.0

    @property
    def ok(self) -> bool:
        return self.agreements == self.cases

    def to_dict(self):
        return {"total_grid": self.total_grid, "cases": self.cases, "agreements": self.agreements,
                "clean_cases": self.clean_cases, "agreement_percent": f"{100 * self.agreement_rate:g}",
                "disagreements": [{k: format_rational(v) for k, v in a.items()} for a in self.disagreements]}


def oracle_grid(model, denominator_bound: int = 4, value_range=3, samples: int | None = 5000,
                window: int = DEFAULT_WINDOW, seed: int = 0) -> GridReport:
    """Cross-check criterion and oracle over a rational grid.

    Each case uses ``max(window, required)`` so that large transported
    exponents never produce an unsound finite-window answer.
    """
    values = rational_grid(denominator_bound, value_range)
    names = model.params.names
    report = GridReport(len(values) ** len(names))
    for assignment in grid_assignments(names, values, samples, seed):
        w = model_window(model, assignment, window)
        res = oracle_vs_criterion(model, assignment, w)
        report.cases += 1
        report.clean_cases += res.criterion_clean
        if res.agree:
            report.agreements += 1
        else:
            report.disagreements.append(assignment)
    return report
