import dataclasses
from fractions import Fraction

import pytest

import oracles
from conftest import perturbations
from flagclean.atlas import (AtlasModel, Chart, FiberSpec, TotalTransition, check_linebundle,
                             derive_logform_cocycle, transition, transition_along,
                             verify_cocycles)
from flagclean.errors import Disconnected, ValidationError
from flagclean.symcore import ExponentVector, LinearForm, MonomialMap, compose

PAIRS = [(i, j) for i in range(1, 5) for j in range(1, 5) if i != j]


def _rows(tr):
    """Total exponent matrix rows over (x, y, a, v)."""
    return [list(r) for r in tr.full().exponents]


@pytest.mark.parametrize("i,j", PAIRS)
def test_transition_matches_geometric_oracle(model, i, j):
    base, fiber, _ = oracles.total_transition(i, j)
    assert _rows(transition(model, i, j)) == [list(r) for r in base + fiber]


def test_chart1_transitions_as_printed(model):
    names, fib = ("x", "y"), ("a", "v")
    out = {j: transition(model, 1, j).format(names, fib) for j in (2, 3, 4)}
    assert out[2] == "(x, y, a, v) -> (1/x, y/x^2, a/x, v/x^3)"
    assert out[3] == "(x, y, a, v) -> (x, 1/y, a/y, v/y)"
    assert out[4] == "(x, y, a, v) -> (1/x, 1/(x^2*y), a/(x*y), v/(x^3*y))"
    for j in (2, 3, 4):
        tr = transition(model, 1, j)
        assert set(tr.base.coeffs) == {1} and set(tr.fiber_units) == {1}


def test_transition_23_is_hand_product(model):
    # Psi_23 = Psi_21 o Psi_13, composed by hand as block maps
    hand = compose(transition(model, 2, 1).full(), transition(model, 1, 3).full())
    assert transition(model, 2, 3).full() == hand
    assert transition_along(model, [3, 1, 2]).same_map(transition(model, 2, 3))


def test_transition_inverse_and_identity(model):
    for i, j in PAIRS:
        assert transition(model, i, j).then(transition(model, j, i)).is_identity()
    assert transition(model, 3, 3).is_identity()


def test_builtin_cocycles_pass(model):
    rep = verify_cocycles(model)
    assert rep.ok
    triangles = [c for c in rep.checked if len(c) == 3]
    assert triangles == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


@pytest.mark.parametrize("name", ["central-row", "base-entry", "coefficient"])
def test_perturbations_are_detected(model, name):
    bad = perturbations(model)[name]
    rep = verify_cocycles(bad)
    assert not rep.ok
    assert all(f.kind == "triangle" for f in rep.failures)


def test_perturbed_central_row_also_breaks_linebundle(model):
    bad = perturbations(model)["central-row"]
    rep = check_linebundle(bad)
    assert [e.pair for e in rep.mismatches] == [(1, 2)]


@pytest.mark.parametrize("i,j", PAIRS)
def test_logform_cocycle_matches_oracle(model, i, j):
    assert derive_logform_cocycle(model, i, j).exponents[0] == oracles.inverse_central_cocycle(i, j)


def test_logform_cocycle_first_row(model):
    got = {j: derive_logform_cocycle(model, 1, j).exponents[0] for j in (2, 3, 4)}
    assert got == {2: (-3, 0), 3: (0, -1), 4: (-1, -1)}


def test_logform_cocycle_law(model):
    # e_ik = e_ij + E^T e_jk where E maps chart-i coordinates to chart-j coordinates
    for i in range(1, 5):
        for j in range(1, 5):
            for k in range(1, 5):
                if len({i, j, k}) < 3:
                    continue
                e_ij = derive_logform_cocycle(model, i, j).exponents[0]
                e_jk = derive_logform_cocycle(model, j, k).exponents[0]
                e_ik = derive_logform_cocycle(model, i, k).exponents[0]
                E = transition(model, j, i).base.exponents
                pulled = tuple(sum(E[r][c] * e_jk[r] for r in range(2)) for c in range(2))
                assert e_ik == tuple(p + q for p, q in zip(e_ij, pulled))


def test_builtin_linebundle_passes(model):
    rep = check_linebundle(model)
    assert rep.ok
    assert len(rep.entries) == 6


@pytest.mark.parametrize("flag", [False, True])
def test_uniform_logpoles_break_linebundle(model, flag):
    charts = [dataclasses.replace(c, logpole=(flag, flag)) for c in model.charts]
    rep = check_linebundle(dataclasses.replace(model, charts=charts))
    assert not rep.ok


def test_single_chart_model():
    m = AtlasModel(
        params=("m",), charts=[Chart("A", ("z",), (True,), (False,))], fiber=FiberSpec(()),
        reference="A", transitions={},
        local_system=ExponentVector((LinearForm.var("m"),)),
    )
    assert transition(m, "A", "A").is_identity()
    assert verify_cocycles(m).ok
    assert check_linebundle(m).ok


def test_disconnected_charts():
    charts = [Chart(c, ("z",), (True,), (False,)) for c in "AB"]
    with pytest.raises(ValidationError) as info:
        AtlasModel(params=("m",), charts=charts, fiber=FiberSpec(()), reference="A",
                   transitions={}, local_system=ExponentVector((LinearForm.var("m"),)))
    assert "not linked" in str(info.value)


def test_unknown_chart_or_step_raises(model):
    with pytest.raises(Disconnected):
        transition(model, 1, 7)
    m = dataclasses.replace(model, transitions={k: v for k, v in model.transitions.items() if 3 not in k or 1 in k})
    with pytest.raises(Disconnected):
        transition_along(m, [2, 3])


def test_validation_rejects_non_unimodular(model):
    trs = dict(model.transitions)
    t = trs[(2, 1)]
    trs[(2, 1)] = TotalTransition(2, 1, MonomialMap([1, 1], [[-2, 0], [-2, 1]]), t.fiber_twists, t.fiber_units)
    with pytest.raises(ValidationError) as info:
        dataclasses.replace(model, transitions=trs)
    assert "unimodular" in str(info.value)


def test_validation_rejects_unknown_parameter(model):
    ls = ExponentVector(model.local_system.base, (LinearForm.var("Lambda"), LinearForm.var("nu")))
    with pytest.raises(ValidationError):
        dataclasses.replace(model, local_system=ls)


def test_transition_coefficients_evaluate_consistently(model):
    pt = (Fraction(2, 3), Fraction(-5, 2), Fraction(7), Fraction(1, 9))
    for i, j in PAIRS:
        fwd = transition(model, i, j).full()
        back = transition(model, j, i).full()
        assert back(fwd(pt)) == pt
