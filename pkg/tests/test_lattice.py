import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagclean.errors import WindowTooSmall
from flagclean.lattice import (coefficient, eigenvalue_tuples, grid_assignments,
                               is_clean_oracle, is_simple, oracle_grid, oracle_vs_criterion,
                               rational_grid, required_window, submodule_support)

q = Fraction


def nonintegral(mu):
    return all(m.denominator != 1 for m in mu)


def test_examples():
    assert is_simple([q(1, 2)], 4)
    assert not is_simple([0], 4)
    assert not is_simple([q(1, 2), 3], 8)
    assert is_simple([q(1, 3), q(-5, 4)], 6)
    assert is_clean_oracle([q(2, 3), q(1, 7)], 4)


def test_window_too_small():
    with pytest.raises(WindowTooSmall) as info:
        is_simple([q(21, 2)], 8)
    assert info.value.required == required_window([q(21, 2)])
    assert is_simple([q(21, 2)], info.value.required)


def test_submodule_support_integral_exponent():
    # mu = 0: from e_0 the lowering move is blocked, so only w >= 0 is reached
    sup = submodule_support([0], [0], 4)
    assert sup == frozenset((w,) for w in range(0, 5))
    # mu = 1/2: everything is reachable
    assert len(submodule_support([q(1, 2)], [0], 4)) == 9


def test_edge_soundness():
    # a blocked move is exactly a vanishing derivative coefficient
    for m in (q(-2), q(1, 2), q(3)):
        for w in range(-5, 6):
            reach = submodule_support([m], [w], 6)
            assert ((w - 1,) in reach) == (coefficient(m, w) != 0)


def test_eigenvalues_are_distinct():
    ev = eigenvalue_tuples([q(1, 3), q(-2, 5)], 3)
    assert len(ev) == len(set(ev)) == 49


def _values(denominator_bound, lo, hi):
    return [v for v in rational_grid(denominator_bound, max(abs(lo), abs(hi))) if lo <= v <= hi]


@pytest.mark.parametrize("n,vals", [
    (1, _values(5, -3, 3)),
    (2, _values(5, -2, 2)),
    (3, _values(5, -1, 1)),
])
def test_closed_form_and_window_doubling(n, vals):
    for mu in itertools.product(vals, repeat=n):
        b = required_window(mu)
        s = is_simple(mu, b)
        assert s == nonintegral(mu)
        assert s == is_simple(mu, 2 * b)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=7), min_size=1, max_size=3))
def test_sign_symmetry_and_closed_form(mu):
    b = required_window(mu)
    assert is_clean_oracle(mu, b) == is_clean_oracle([-m for m in mu], b)
    assert is_clean_oracle(mu, b) == nonintegral(mu)


def test_rational_grid_counts():
    g = rational_grid(4, 3)
    assert g[0] == -3 and g[-1] == 3 and q(3, 4) in g and q(1, 5) not in g
    assert len(g) == len(set(g)) == 37


def test_grid_assignments_deterministic():
    vals = rational_grid(2, 1)
    a = list(grid_assignments(("p", "r"), vals, 7, seed=3))
    assert a == list(grid_assignments(("p", "r"), vals, 7, seed=3))
    assert len({tuple(x.values()) for x in a}) == 7
    full = list(grid_assignments(("p", "r"), vals, None))
    assert len(full) == len(vals) ** 2


def test_oracle_vs_criterion_single_case(model):
    r = oracle_vs_criterion(model, {"mu_-1": q(1, 2), "mu_0": q(1, 2), "Lambda": q(1, 2), "kappa": 0}, 16)
    assert r.agree and not r.oracle_clean
    assert [c[2] for c in r.charts] == [True, False, False, False]


def test_oracle_grid_small(model):
    rep = oracle_grid(model, denominator_bound=3, value_range=2, samples=300, seed=1)
    assert rep.cases == 300
    assert rep.ok and not rep.disagreements
    assert 0 < rep.clean_cases < 300
