"""YAML model files: load with located diagnostics, dump for round trips.

Layout::

    params: [mu_-1, mu_0, Lambda, kappa]
    fiber: {names: [a, v], central: v}
    charts:
      - {id: 1, coords: [x, y], divisorial: [true, true], logpole: [false, false]}
    reference: 1
    transitions:            # source-chart coordinates -> target-chart coordinates
      - source: 2
        target: 1
        exponents: [[-1, 0], [-2, 1]]
        coefficients: ["1", "1"]
        fiber_twists: [[-1, 0], [-3, 0]]
        fiber_units: ["1", "1"]
    local_system: {base: [mu_-1, mu_0], fiber: [Lambda, kappa]}
    central_cocycle:        # optional; omega_j/omega_i in chart-i coordinates
      - {charts: [1, 2], exponents: [-3, 0], coefficient: "1"}
    loopgroup_fixtures:     # optional
      - {name: ..., variables: [x, y], g1: [[..], [..]], g2: [[..], [..]],
         subgroup: I, expected: "yes"}

Rationals are integers or ``"p/q"`` strings; floats are rejected.
"""
from __future__ import annotations

import re
from pathlib import Path

import yaml

from .atlas import AtlasModel, Chart, FiberSpec, TotalTransition
from .errors import Diagnostic, FlagCleanError, ModelFileError, ParseError, ValidationError
from .loopgroup import Fixture
from .symcore import (ExponentVector, MonomialMap, ParamSpace, as_rational,
                      format_rational, parse_form)

__all__ = ["load_model", "loads_model", "dump_model", "model_to_dict"]


def _path_str(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _marks(node, path=(), out=None):
    if out is None:
        out = {}
    out[path] = node.start_mark
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _marks(v, path + (k.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _marks(v, path + (i,), out)
    return out


class _Reader:
    """Collects every problem instead of stopping at the first."""

    def __init__(self, marks):
        self.marks = marks
        self.diagnostics = []

    def error(self, path, message):
        path = tuple(path)
        probe = path
        while probe not in self.marks and probe:
            probe = probe[:-1]
        mark = self.marks.get(probe)
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        self.diagnostics.append(Diagnostic(_path_str(path), line, col, message))

    def get(self, data, path, key, kind, required=True, default=None):
        if not isinstance(data, dict):
            return default
        if key not in data:
            if required:
                self.error(path, f"missing required field '{key}'")
            return default
        value = data[key]
        if kind is not None and not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
            names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            self.error(path + (key,), f"expected {names}, got {type(value).__name__}")
            return default
        return value

    def rational(self, value, path):
        try:
            return as_rational(value)
        except (TypeError, ValueError) as exc:
            self.error(path, str(exc))
            return None

    def int_matrix(self, value, path, rows=None, cols=None):
        if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
            self.error(path, "expected a list of integer rows")
            return None
        bad = False
        for i, row in enumerate(value):
            for j, e in enumerate(row):
                if isinstance(e, bool) or not isinstance(e, int):
                    self.error(path + (i, j), f"exponent must be an integer, got {e!r}")
                    bad = True
        if rows is not None and len(value) != rows:
            self.error(path, f"expected {rows} rows, got {len(value)}")
            bad = True
        if cols is not None:
            for i, row in enumerate(value):
                if len(row) != cols:
                    self.error(path + (i,), f"expected {cols} entries, got {len(row)}")
                    bad = True
        return None if bad else value

    def flags(self, value, path, n):
        if not isinstance(value, list) or not all(isinstance(b, bool) for b in value):
            self.error(path, "expected a list of booleans")
            return None
        if len(value) != n:
            self.error(path, f"expected {n} flags, got {len(value)}")
            return None
        return tuple(value)


_MODEL_PATH = re.compile(r"^(transitions|central_cocycle)\[(.+?)->(.+?)\](.*)$")


def _build(data, reader: _Reader) -> AtlasModel | None:
    if not isinstance(data, dict):
        reader.error((), "model file must be a mapping")
        return None
    R = reader
    params = R.get(data, (), "params", list)
    if params is not None:
        if not all(isinstance(p, str) for p in params):
            R.error(("params",), "parameter names must be strings")
            params = None
        elif len(set(params)) != len(params):
            R.error(("params",), "parameter names must be unique")
            params = None

    fiber_data = R.get(data, (), "fiber", dict, required=False, default={})
    fiber_names = R.get(fiber_data, ("fiber",), "names", list, required=False, default=[])
    central = R.get(fiber_data, ("fiber",), "central", str, required=False)
    fiber = FiberSpec(tuple(str(n) for n in fiber_names), central)
    k = len(fiber)

    charts = []
    chart_list = R.get(data, (), "charts", list) or []
    for idx, c in enumerate(chart_list):
        p = ("charts", idx)
        if not isinstance(c, dict):
            R.error(p, "chart must be a mapping")
            continue
        cid = R.get(c, p, "id", (int, str))
        coords = R.get(c, p, "coords", list)
        if cid is None or coords is None:
            continue
        n = len(coords)
        div = R.flags(c.get("divisorial", [True] * n), p + ("divisorial",), n)
        pole = R.flags(c.get("logpole", [False] * n), p + ("logpole",), n)
        if div is not None and pole is not None:
            charts.append(Chart(cid, tuple(str(x) for x in coords), div, pole))
    n = charts[0].dim if charts else 0

    reference = R.get(data, (), "reference", (int, str))

    transitions = {}
    index_of = {}
    for idx, t in enumerate(R.get(data, (), "transitions", list, required=False, default=[])):
        p = ("transitions", idx)
        if not isinstance(t, dict):
            R.error(p, "transition must be a mapping")
            continue
        s, tg = R.get(t, p, "source", (int, str)), R.get(t, p, "target", (int, str))
        ex = R.int_matrix(R.get(t, p, "exponents", list, default=[]), p + ("exponents",), n, n)
        coeffs = R.get(t, p, "coefficients", list, required=False, default=[1] * n)
        cs = [R.rational(c, p + ("coefficients", i)) for i, c in enumerate(coeffs)]
        if len(cs) != n:
            R.error(p + ("coefficients",), f"expected {n} coefficients, got {len(cs)}")
            cs = None
        elif any(c == 0 for c in cs if c is not None):
            R.error(p + ("coefficients",), "coefficients must be nonzero")
            cs = None
        tw = R.int_matrix(R.get(t, p, "fiber_twists", list, required=k > 0, default=[]),
                          p + ("fiber_twists",), k, n)
        units = R.get(t, p, "fiber_units", list, required=False, default=[1] * k)
        us = [R.rational(u, p + ("fiber_units", i)) for i, u in enumerate(units)]
        if len(us) != k:
            R.error(p + ("fiber_units",), f"expected {k} units, got {len(us)}")
            us = None
        elif any(u == 0 for u in us if u is not None):
            R.error(p + ("fiber_units",), "fiber units must be nonzero")
            us = None
        if None in (s, tg, ex, cs, tw, us) or None in cs or None in us:
            continue
        if (s, tg) in transitions:
            R.error(p, f"duplicate transition {s}->{tg}")
            continue
        try:
            transitions[(s, tg)] = TotalTransition(s, tg, MonomialMap(cs, ex, n), tw, us)
            index_of[(str(s), str(tg))] = idx
        except (FlagCleanError, ValueError) as exc:
            R.error(p, str(exc))

    ls = R.get(data, (), "local_system", dict, default={})
    base_f, fiber_f = [], []
    if params is not None:
        for part, out in (("base", base_f), ("fiber", fiber_f)):
            items = R.get(ls, ("local_system",), part, list, required=part == "base" or k > 0, default=[])
            for i, text in enumerate(items):
                try:
                    out.append(parse_form(str(text), params))
                except ValueError as exc:
                    R.error(("local_system", part, i), str(exc))

    cocycle = None
    cc_index = {}
    if "central_cocycle" in data:
        cocycle = {}
        for idx, e in enumerate(R.get(data, (), "central_cocycle", list, default=[])):
            p = ("central_cocycle", idx)
            pair = R.get(e, p, "charts", list)
            ex = R.get(e, p, "exponents", list)
            coeff = R.rational(e.get("coefficient", 1), p + ("coefficient",)) if isinstance(e, dict) else None
            if pair is None or ex is None or coeff is None:
                continue
            if len(pair) != 2:
                R.error(p + ("charts",), "expected a chart pair [i, j]")
                continue
            row = R.int_matrix([ex], p + ("exponents",), 1, n)
            if row is None or coeff == 0:
                if coeff == 0:
                    R.error(p + ("coefficient",), "coefficient must be nonzero")
                continue
            cocycle[tuple(pair)] = MonomialMap.monomial(row[0], coeff)
            cc_index[(str(pair[0]), str(pair[1]))] = idx

    fixtures = []
    for idx, f in enumerate(R.get(data, (), "loopgroup_fixtures", list, required=False, default=[])):
        p = ("loopgroup_fixtures", idx)
        if not isinstance(f, dict):
            R.error(p, "fixture must be a mapping")
            continue
        expected = f.get("expected", "yes")
        if isinstance(expected, bool):  # YAML 1.1 reads bare yes/no as booleans
            expected = "yes" if expected else "no"
        try:
            fx = Fixture(str(f.get("name", f"fixture{idx}")), tuple(f.get("variables", ())),
                         f["g1"], f["g2"], f.get("subgroup", "I"), str(expected))
            fx.matrices(1)
            fixtures.append(fx)
        except KeyError as exc:
            R.error(p, f"missing required field {exc}")
        except Exception as exc:  # sympy raises a zoo of types on bad input
            R.error(p, f"bad fixture: {exc}")

    if reader.diagnostics or params is None:
        return None
    try:
        return AtlasModel(ParamSpace(params), charts, fiber, reference, transitions,
                          ExponentVector(base_f, fiber_f), cocycle, fixtures)
    except ValidationError as exc:
        for d in exc.diagnostics:
            m = _MODEL_PATH.match(d.path or "")
            path = (d.path,)
            if m:
                table = index_of if m.group(1) == "transitions" else cc_index
                idx = table.get((m.group(2), m.group(3)))
                rest = [x for x in re.split(r"[.\[\]]", m.group(4)) if x]
                path = (m.group(1), idx) + tuple(int(x) if x.isdigit() else x for x in rest)
            else:
                path = tuple(int(x) if x.isdigit() else x for x in re.split(r"[.\[\]]", d.path or "") if x)
            reader.error(path, d.message)
        return None


def loads_model(text: str, source: str | None = None) -> AtlasModel:
    """Parse model text; raises ParseError or ValidationError listing every problem."""
    try:
        return _loads(text)
    except ModelFileError as exc:
        for d in exc.diagnostics:
            d.source = source
        raise type(exc)(exc.diagnostics) from None


def _loads(text: str) -> AtlasModel:
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else None
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise ParseError([Diagnostic("", line, col, str(exc.problem or exc))]) from None
    if node is None:
        raise ParseError([Diagnostic("", 1, 1, "empty model file")])
    reader = _Reader(_marks(node))
    model = _build(data, reader)
    if model is None:
        raise ValidationError(reader.diagnostics or [Diagnostic("", None, None, "invalid model")])
    return model


def load_model(path) -> AtlasModel:
    path = Path(path)
    return loads_model(path.read_text(encoding="utf-8"), str(path))


class _Flow(list):
    """List rendered inline by the dumper."""


def _flow_rep(dumper, data):
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=True)


class _Dumper(yaml.SafeDumper):
    pass


_Dumper.add_representer(_Flow, _flow_rep)


def model_to_dict(model: AtlasModel) -> dict:
    rat = format_rational
    order = model.params.names
    out = {
        "params": _Flow(model.params.names),
        "fiber": {"names": _Flow(model.fiber.names)},
        "charts": [{"id": c.id, "coords": _Flow(c.base_coords), "divisorial": _Flow(c.divisorial),
                    "logpole": _Flow(c.logpole)} for c in model.charts],
        "reference": model.reference,
        "transitions": [{"source": s, "target": t,
                         "exponents": _Flow(_Flow(r) for r in tr.base.exponents),
                         "coefficients": _Flow(rat(c) for c in tr.base.coeffs),
                         "fiber_twists": _Flow(_Flow(r) for r in tr.fiber_twists),
                         "fiber_units": _Flow(rat(u) for u in tr.fiber_units)}
                        for (s, t), tr in model.transitions.items()],
        "local_system": {"base": _Flow(f.format(order) for f in model.local_system.base),
                         "fiber": _Flow(f.format(order) for f in model.local_system.fiber)},
    }
    if model.fiber.central is not None:
        out["fiber"]["central"] = model.fiber.central
    if model.declared_central_cocycle is not None:
        out["central_cocycle"] = [{"charts": _Flow(pair), "exponents": _Flow(m.exponents[0]),
                                   "coefficient": rat(m.coeffs[0])}
                                  for pair, m in model.declared_central_cocycle.items()]
    if model.fixtures:
        out["loopgroup_fixtures"] = [{"name": f.name, "variables": _Flow(f.variables),
                                      "g1": [_Flow(r) for r in f.g1], "g2": [_Flow(r) for r in f.g2],
                                      "subgroup": f.subgroup, "expected": f.expected}
                                     for f in model.fixtures]
    return out


def dump_model(model: AtlasModel) -> str:
    return yaml.dump(model_to_dict(model), Dumper=_Dumper, sort_keys=False, allow_unicode=True, width=100)
