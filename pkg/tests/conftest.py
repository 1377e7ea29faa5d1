import dataclasses
import random
from fractions import Fraction

import pytest

from flagclean import builtin_sl2
from flagclean.symcore import MonomialMap


@pytest.fixture(scope="session")
def model():
    return builtin_sl2()


def random_unimodular(rng: random.Random, n: int, steps: int = 6):
    """Product of random elementary matrices and sign flips."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n > 1 and rng.random() < 0.8:
            i, j = rng.sample(range(n), 2)
            k = rng.choice([-2, -1, 1, 2])
            m[i] = [a + k * b for a, b in zip(m[i], m[j])]
        else:
            i = rng.randrange(n)
            m[i] = [-a for a in m[i]]
    if rng.random() < 0.5:
        rng.shuffle(m)
    return m


def random_map(rng: random.Random, n: int):
    coeffs = [Fraction(rng.choice([-3, -2, -1, 1, 2, 5]), rng.choice([1, 2, 3])) for _ in range(n)]
    return MonomialMap(coeffs, random_unimodular(rng, n), n)


def _perturb(model, key, **changes):
    trs = dict(model.transitions)
    trs[key] = dataclasses.replace(trs[key], **changes)
    return dataclasses.replace(model, transitions=trs)


def perturbations(model):
    """Three single-entry perturbations of the gluing data."""
    t21 = model.transitions[(2, 1)]
    t31 = model.transitions[(3, 1)]
    # 1. central row of Psi_12: v/x^3 -> v/x^2
    p1 = _perturb(model, (2, 1), fiber_twists=((-1, 0), (-2, 0)))
    # 2. one base exponent of Psi_13, still unimodular: (x, 1/y) -> (x/y, 1/y)
    p2 = _perturb(model, (3, 1), base=MonomialMap(t31.base.coeffs, [[1, -1], [0, -1]]))
    # 3. one coefficient of Psi_12: 1/x -> 2/x
    p3 = _perturb(model, (2, 1), base=MonomialMap([2, 1], t21.base.exponents))
    return {"central-row": p1, "base-entry": p2, "coefficient": p3}


# acceptance verdict lines, printed at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
