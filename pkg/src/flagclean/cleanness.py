"""Cleanness criterion: transport exponents chart by chart, collect boundary forms.

Cleanness of the extension is local on the cover, and on a chart
``A^n x (fiber torus)`` the rank-one system with exponents ``(m_1..m_n | ...)``
extends cleanly iff no base exponent attached to a boundary divisor is an
integer.  So the whole criterion is the set of base exponents, transported
to every chart, taken up to sign and integer shift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .atlas import AtlasModel, transition
from .errors import MissingParameter
from .symcore import (ExponentVector, LinearForm, evaluate, format_rational,
                      normalize_form, pullback_exponents)

__all__ = [
    "BoundaryForm", "Criterion", "Verdict",
    "chart_exponents", "boundary_forms", "criterion", "specialize",
    "evaluate_clean",
]


@dataclass(frozen=True)
class BoundaryForm:
    chart: object
    coordinate: str
    form: LinearForm


@dataclass
class Criterion:
    order: tuple[str, ...]
    forms: list[LinearForm] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    def formatted(self) -> list[str]:
        return [f.format(self.order) for f in self.forms]

    def to_dict(self):
        return {"forms": [
            {"form": f.format(self.order),
             "witnesses": [{"chart": str(c), "coordinate": x} for c, x in self.witnesses[f]]}
            for f in self.forms]}


@dataclass
class Verdict:
    clean: bool
    violated: list = field(default_factory=list)  # (LinearForm, Fraction)
    values: list = field(default_factory=list)    # (LinearForm, Fraction) for every form
    order: tuple[str, ...] = ()

    def to_dict(self):
        fmt = lambda pairs: [{"form": f.format(self.order), "value": format_rational(v)} for f, v in pairs]  # noqa: E731
        return {"clean": self.clean, "violated": fmt(self.violated), "values": fmt(self.values)}


def chart_exponents(model: AtlasModel, i) -> ExponentVector:
    """Exponents of the local system in chart-``i`` coordinates."""
    key = ("chart_exponents", i)
    if key not in model._cache:
        tr = transition(model, model.reference, i)
        flat = pullback_exponents(tr.full(), model.local_system.flat)
        n = tr.base_dim
        model._cache[key] = ExponentVector(flat[:n], flat[n:])
    return model._cache[key]


def boundary_forms(model: AtlasModel, local_system: ExponentVector | None = None) -> list[BoundaryForm]:
    out = []
    order = model.params.names
    for chart in model.charts:
        if local_system is None:
            exps = chart_exponents(model, chart.id)
        else:
            tr = transition(model, model.reference, chart.id)
            exps = ExponentVector(pullback_exponents(tr.full(), local_system.flat)[:tr.base_dim])
        for coord, div, form in zip(chart.base_coords, chart.divisorial, exps.base):
            if div:
                out.append(BoundaryForm(chart.id, coord, normalize_form(form, order)))
    return out


def _collect(model: AtlasModel, bforms) -> Criterion:
    crit = Criterion(model.params.names)
    for bf in bforms:
        if bf.form not in crit.witnesses:
            crit.forms.append(bf.form)
            crit.witnesses[bf.form] = []
        crit.witnesses[bf.form].append((bf.chart, bf.coordinate))
    return crit


def criterion(model: AtlasModel) -> Criterion:
    """Deduplicated boundary forms, ordered by their first witness (chart order, then coordinate)."""
    return _collect(model, boundary_forms(model))


def specialize(model: AtlasModel, assignment: Mapping[str, object]) -> Criterion:
    """Criterion after fixing some parameters (e.g. integral twist parameters)."""
    ls = model.local_system.substitute(assignment)
    return _collect(model, boundary_forms(model, ls))


def evaluate_clean(model: AtlasModel, assignment: Mapping[str, object]) -> Verdict:
    missing = set(model.params.names) - set(assignment)
    if missing:
        raise MissingParameter(missing)
    crit = criterion(model)
    values = [(f, evaluate(f, assignment)) for f in crit.forms]
    violated = [(f, v) for f, v in values if v.denominator == 1]
    return Verdict(not violated, violated, values, crit.order)
