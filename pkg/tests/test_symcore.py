import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_map, random_unimodular
from flagclean.errors import DimensionMismatch, MissingParameter, NonInvertible
from flagclean.symcore import (ExponentVector, LinearForm, MonomialMap, ParamSpace,
                               as_rational, compose, evaluate, int_det, invert,
                               is_integral, monomial_str, normalize_form, parse_form,
                               pullback_exponents)

P = ("mu_-1", "mu_0", "Lambda", "kappa")
V = LinearForm.var


def test_as_rational_accepts_exact_inputs_only():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational(-4) == -4
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


def test_linear_form_arithmetic_and_format():
    f = V("mu_-1") + 2 * V("mu_0") + V("Lambda") + 3 * V("kappa")
    assert f.format(P) == "mu_-1 + 2*mu_0 + Lambda + 3*kappa"
    assert (f - f).is_constant() and (f - f).constant == 0
    assert (-f).coefficient("kappa") == -3
    assert (f + LinearForm.const(Fraction(-1, 2))).format(P).endswith("- 1/2")


def test_parse_form_roundtrip_and_longest_name_match():
    f = parse_form("mu_-1 + 2*mu_0 - Lambda/3 + 1/2", P)
    assert f.coefficient("mu_-1") == 1
    assert f.coefficient("mu_0") == 2
    assert f.coefficient("Lambda") == Fraction(-1, 3)
    assert f.constant == Fraction(1, 2)
    assert parse_form(f.format(P), P) == f
    with pytest.raises(ValueError):
        parse_form("mu_1 + 1", P)


def test_normalize_sign_and_constant():
    f = -V("mu_-1") - 2 * V("mu_0") - V("Lambda") - 3 * V("kappa") + LinearForm.const(5)
    assert normalize_form(f, P) == V("mu_-1") + 2 * V("mu_0") + V("Lambda") + 3 * V("kappa")
    g = V("mu_0") + LinearForm.const(Fraction(-7, 3))
    assert normalize_form(g, P) == V("mu_0") + LinearForm.const(Fraction(2, 3))


forms = st.builds(
    lambda cs, c: sum((V(n) * k for n, k in zip(P, cs)), LinearForm.const(c)),
    st.lists(st.fractions(max_denominator=6).map(lambda q: q.limit_denominator(6)), min_size=4, max_size=4),
    st.fractions(max_denominator=6),
)


@given(forms, st.integers(-5, 5), st.sampled_from([1, -1]))
def test_normalize_is_idempotent_and_orbit_invariant(f, shift, sign):
    n = normalize_form(f, P)
    assert normalize_form(n, P) == n
    # integrality of a form at a point is invariant under f -> ±f + k
    assert normalize_form(f * sign + LinearForm.const(shift), P) == n


@given(forms, st.lists(st.fractions(max_denominator=5), min_size=4, max_size=4))
def test_integrality_agrees_with_normal_form(f, vals):
    a = dict(zip(P, vals))
    assert is_integral(f, a) == is_integral(normalize_form(f, P), a)


def test_evaluate_requires_all_variables():
    with pytest.raises(MissingParameter) as info:
        evaluate(V("mu_0") + V("kappa"), {"mu_0": 1})
    assert "kappa" in info.value.names


def test_param_space_rejects_duplicates():
    with pytest.raises(ValueError):
        ParamSpace(("a", "a"))


def test_int_det_matches_cofactor_expansion():
    assert int_det([[2, 1], [7, 4]]) == 1
    assert int_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3
    assert int_det([]) == 1


def test_compose_and_invert_examples():
    phi = MonomialMap([1, 1], [[-1, 0], [-2, 1]])          # (x, y) -> (1/x, y/x^2)
    assert compose(phi, phi).is_identity()
    assert invert(phi) == phi
    f = MonomialMap([2, Fraction(1, 3)], [[1, 1], [0, 1]])
    g = invert(f)
    assert g.exponents == ((1, -1), (0, 1))
    assert g.coeffs == (Fraction(1, 6), 3)
    pt = (Fraction(5, 7), Fraction(-2, 3))
    assert g(f(pt)) == pt


def test_invert_rejects_non_unimodular():
    with pytest.raises(NonInvertible):
        invert(MonomialMap([1, 1], [[2, 0], [0, 1]]))
    with pytest.raises(NonInvertible):
        invert(MonomialMap([1], [[1, 1]]))


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        compose(MonomialMap.identity(2), MonomialMap.identity(3))
    with pytest.raises(DimensionMismatch):
        pullback_exponents(MonomialMap.identity(2), [1])


def test_monomial_str():
    assert monomial_str(1, (-2, -1), ("x", "y")) == "1/(x^2*y)"
    assert monomial_str(1, (0, 0), ("x", "y")) == "1"
    assert monomial_str(Fraction(-3, 2), (1, -1), ("x", "y")) == "-3*x/(y*2)"


def test_pullback_of_character_is_composition():
    # pulling back the exponents of z^lam along f equals the exponent row of (z^lam) o f
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 4)
        f = random_map(rng, n)
        lam = [rng.randint(-4, 4) for _ in range(n)]
        direct = compose(MonomialMap.monomial(lam), f).exponents[0]
        assert tuple(pullback_exponents(f, lam)) == direct


def test_exponent_vector_substitution():
    ev = ExponentVector((V("mu_0") + V("kappa"),), (V("kappa"),))
    s = ev.substitute({"kappa": 2})
    assert s.flat == (V("mu_0") + LinearForm.const(2), LinearForm.const(2))


# Group laws on 200+ random unimodular maps, checked by exact evaluation.
def _random_maps(seed, count):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, 4)
        out.append((rng, n, random_map(rng, n), random_map(rng, n), random_map(rng, n)))
    return out


def _point(rng, n):
    return tuple(Fraction(rng.choice([-5, -2, -1, 1, 3, 4]), rng.choice([1, 2, 7])) for _ in range(n))


@pytest.mark.parametrize("seed", range(4))
def test_group_laws_on_random_maps(seed):
    for rng, n, f, g, h in _random_maps(seed, 60):
        assert abs(f.det()) == 1
        assert compose(f, compose(g, h)) == compose(compose(f, g), h)
        assert compose(f, invert(f)).is_identity()
        assert compose(invert(f), f).is_identity()
        assert invert(compose(f, g)) == compose(invert(g), invert(f))
        assert compose(f, MonomialMap.identity(n)) == f
        p = _point(rng, n)
        assert compose(f, g)(p) == f(g(p))
        assert invert(f)(f(p)) == p
        lam = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)]
        # (f o g)^* = g^* o f^*
        assert pullback_exponents(compose(f, g), lam) == pullback_exponents(g, pullback_exponents(f, lam))


@settings(max_examples=60)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_random_unimodular_is_unimodular(n, seed):
    m = random_unimodular(random.Random(seed), n)
    assert abs(int_det(m)) == 1
