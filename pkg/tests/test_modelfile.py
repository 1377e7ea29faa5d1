from pathlib import Path

import pytest

from flagclean.cleanness import criterion
from flagclean.errors import ParseError, ValidationError
from flagclean.modelfile import dump_model, load_model, loads_model

PLANE = Path(__file__).resolve().parents[1] / "demos" / "plane.yaml"


def test_builtin_round_trip(model):
    text = dump_model(model)
    again = loads_model(text)
    assert again == model
    assert dump_model(again) == text


def test_plane_model_loads():
    m = load_model(PLANE)
    assert criterion(m).formatted() == ["m1", "m2", "m1 + m2"]


def _edit(model, old, new):
    text = dump_model(model)
    assert old in text
    return text.replace(old, new, 1)


def test_non_unimodular_transition_is_located(model):
    text = _edit(model, "exponents: [[-1, 0], [-2, 1]]", "exponents: [[-2, 0], [-2, 1]]")
    with pytest.raises(ValidationError) as info:
        loads_model(text, "bad.yaml")
    d = info.value.diagnostics[0]
    assert d.path == "transitions[0].exponents"
    assert d.line == text.splitlines().index("  exponents: [[-2, 0], [-2, 1]]") + 1
    assert "unimodular" in d.message


def test_fiber_name_clash(model):
    text = _edit(model, "names: [a, v]", "names: [x, v]")
    with pytest.raises(ValidationError) as info:
        loads_model(text)
    assert any("clash" in d.message for d in info.value.diagnostics)


def test_all_errors_reported_together(model):
    # both problems are found in one pass over the file
    text = _edit(model, "coefficients: ['1', '1']", "coefficients: [0.5, '1']")
    text = text.replace("fiber: [Lambda, kappa]", "fiber: [Lambda, nu]")
    with pytest.raises(ValidationError) as info:
        loads_model(text)
    assert len(info.value.diagnostics) >= 2


def test_float_rejected(model):
    text = _edit(model, "coefficients: ['1', '1']", "coefficients: [0.5, '1']")
    with pytest.raises(ValidationError) as info:
        loads_model(text)
    assert "coefficients" in info.value.diagnostics[0].path


def test_yaml_syntax_error_has_location():
    with pytest.raises(ParseError) as info:
        loads_model("params: [a, b\ncharts: {")
    assert info.value.diagnostics[0].line is not None


def test_missing_file():
    with pytest.raises(OSError):
        load_model("/nonexistent/model.yaml")
