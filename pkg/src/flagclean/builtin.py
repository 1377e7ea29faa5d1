"""The four-chart model of the two-dimensional Schubert variety in the SL2 affine flags.

Chart 1 is the open cell with coordinates ``(a_{-1}, a_0)``, the
coefficients of ``t^{-1}`` and ``t^0`` in ``[[t, a_{-1}/t + a_0], [0, 1/t]]``.
The other charts use

    chart 2: (1/a_{-1}, a_0/a_{-1}^2)
    chart 3: (a_{-1}, 1/a_0)
    chart 4: (1/a_{-1}, a_{-1}^2/a_0)

Above each chart sit the torus coordinate ``a`` of the T-torsor (trivialized
by the diagonal sections f_i) and the central coordinate ``v`` of the level
line bundle.

Parameter names map to the usual symbols as ``mu_-1`` = mu_{-1},
``mu_0`` = mu_0, ``Lambda`` = Lambda (the T-twist), ``kappa`` = kappa (the
central twist).
"""
from __future__ import annotations

from functools import lru_cache

from .atlas import AtlasModel, Chart, FiberSpec, TotalTransition
from .loopgroup import Fixture
from .symcore import ExponentVector, LinearForm, MonomialMap, ParamSpace

__all__ = ["builtin_sl2", "builtin_fixtures", "PARAMS", "SYMBOLS"]

PARAMS = ("mu_-1", "mu_0", "Lambda", "kappa")
SYMBOLS = {"mu_-1": "μ₋₁", "mu_0": "μ₀", "Lambda": "Λ", "kappa": "κ"}

# (source, target): base exponents, fiber rows (a, v).  The first three are
# the chart-1 transitions; the last three close every triangle so the gluing
# data is redundant and can be checked.
_TRANSITIONS = {
    (2, 1): ([[-1, 0], [-2, 1]], [[-1, 0], [-3, 0]]),
    (3, 1): ([[1, 0], [0, -1]], [[0, -1], [0, -1]]),
    (4, 1): ([[-1, 0], [-2, -1]], [[-1, -1], [-3, -1]]),
    (3, 2): ([[-1, 0], [-2, -1]], [[-1, -1], [-3, -1]]),
    (4, 2): ([[1, 0], [0, -1]], [[0, -1], [0, -1]]),
    (4, 3): ([[-1, 0], [2, 1]], [[1, 0], [-1, 0]]),
}

# log poles of the reference section of C^{-1}: none on the open cell,
# along x = 0 on chart 2, along y = 0 on chart 3, along both on chart 4
_LOGPOLES = {1: (False, False), 2: (True, False), 3: (False, True), 4: (True, True)}

# t_{1j}^{(-1)} in chart-1 coordinates
_INVERSE_CENTRAL = {(1, 2): [-3, 0], (1, 3): [0, -1], (1, 4): [-1, -1]}


def _transition(source, target, base, fiber):
    return TotalTransition(source, target, MonomialMap([1, 1], base),
                           fiber, [1] * len(fiber))


def builtin_fixtures() -> tuple[Fixture, ...]:
    """Coset identities behind the chart and section extensions.

    With ``g(p, q) = [[t, p/t + q], [0, 1/t]]`` and chart coordinates
    substituted for ``(a_{-1}, a_0)``, the family ``g f_i`` is matched
    against a matrix ``h_i`` that is polynomial in the chart coordinates;
    that is what makes the section extend over the whole chart.  The
    remaining fixtures regularize the boundary degenerations of the open
    cell.
    """
    h2 = (("0", "1/t"), ("-t", "x/t - y"))
    h3 = (("-x", "1 + x*y/t"), ("-1", "y/t"))
    h4 = (("-1", "y/t"), ("-x", "x*y/t - 1"))
    xy = ("x", "y")
    cell = (("t", "a_m1/t + a_0"), ("0", "1/t"))
    fx = [
        ("chart1-section", ("a_m1", "a_0"), cell, cell, "Iu", "yes"),
        # g(1/x, y/x^2) diag(1/x), g(x, 1/y) diag(1/y), g(1/x, 1/(x^2 y)) diag(1/(x y))
        ("chart2-section", xy, (("t/x", "y/x + 1/t"), ("0", "x/t")), h2, "Iu", "yes"),
        ("chart3-section", xy, (("t/y", "1 + x*y/t"), ("0", "y/t")), h3, "Iu", "yes"),
        ("chart4-section", xy, (("t/(x*y)", "1/x + y/t"), ("0", "x*y/t")), h4, "Iu", "yes"),
        ("chart2-point", xy, (("t", "1/(x*t) + y/x**2"), ("0", "1/t")), h2, "I", "yes"),
        ("chart3-point", xy, (("t", "x/t + 1/y"), ("0", "1/t")), h3, "I", "yes"),
        ("chart4-point", xy, (("t", "1/(x*t) + 1/(x**2*y)"), ("0", "1/t")), h4, "I", "yes"),
        ("chart2-boundary", ("y",), (("1", "-1/(y*t)"), ("0", "1")), (("0", "1/t"), ("-t", "-y")), "I", "yes"),
        ("unipotent-limit", ("a",), (("1", "a/t"), ("0", "1")), (("0", "1/t"), ("-t", "1/a")), "I", "yes"),
        ("translation-limit", ("a",), (("t", "a/t"), ("0", "1/t")), (("0", "1/t"), ("-t", "1/(a*t)")), "I", "yes"),
        ("a0-limit", ("a",), (("t", "a"), ("0", "1/t")), (("0", "1"), ("-1", "1/(a*t)")), "I", "yes"),
        ("identity-limit", ("a_0",), (("a_0", "1"), ("-1", "0")), (("1", "0"), ("-1/a_0", "1")), "I", "yes"),
        ("distinct-limits", ("a",), (("1", "a/t"), ("0", "1")), (("t", "a/t"), ("0", "1/t")), "I", "no"),
        ("torus-not-unipotent", ("a_0",), (("a_0", "1"), ("-1", "0")), (("1", "0"), ("-1/a_0", "1")), "Iu", "no"),
    ]
    return tuple(Fixture(*f) for f in fx)


@lru_cache(maxsize=1)
def builtin_sl2() -> AtlasModel:
    charts = [Chart(i, ("x", "y"), (True, True), _LOGPOLES[i]) for i in (1, 2, 3, 4)]
    transitions = {k: _transition(*k, *v) for k, v in _TRANSITIONS.items()}
    var = LinearForm.var
    return AtlasModel(
        params=ParamSpace(PARAMS),
        charts=charts,
        fiber=FiberSpec(("a", "v"), central="v"),
        reference=1,
        transitions=transitions,
        local_system=ExponentVector((var("mu_-1"), var("mu_0")), (var("Lambda"), var("kappa"))),
        declared_central_cocycle={k: MonomialMap.monomial(e) for k, e in _INVERSE_CENTRAL.items()},
        fixtures=builtin_fixtures(),
    )
