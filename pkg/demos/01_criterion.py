"""Derive the cleanness criterion for the builtin SL2 model and try it out."""
from fractions import Fraction as Q

from flagclean import builtin_sl2, chart_exponents, criterion, evaluate_clean, specialize
from flagclean.symcore import format_rational

model = builtin_sl2()
names = model.params.names

print("exponents of the local system on each chart (base | fiber):")
for cid in model.chart_ids:
    ev = chart_exponents(model, cid)
    base = ", ".join(f.format(names) for f in ev.base)
    fib = ", ".join(f.format(names) for f in ev.fiber)
    print(f"  chart {cid}: ({base} | {fib})")

crit = criterion(model)
print("\nclean iff none of these is an integer:")
for form in crit.forms:
    where = ", ".join(f"chart {c} along {x} = 0" for c, x in crit.witnesses[form])
    print(f"  {form.format(names):<36} from {where}")

print("\nsome parameter points:")
points = [
    {"mu_-1": Q(1, 2), "mu_0": Q(1, 3), "Lambda": 0, "kappa": 0},
    {"mu_-1": Q(1, 2), "mu_0": Q(1, 2), "Lambda": Q(1, 2), "kappa": 0},
    {"mu_-1": Q(1, 3), "mu_0": Q(1, 3), "Lambda": Q(1, 3), "kappa": 0},
]
for pt in points:
    v = evaluate_clean(model, pt)
    bad = ", ".join(f.format(names) for f, _ in v.violated) or "-"
    at = ", ".join(f"{n}={format_rational(Q(x))}" for n, x in pt.items())
    print(f"  {at}: {'clean' if v.clean else 'not clean'} (integral: {bad})")

# with integral twists the two mixed conditions collapse to mu_-1 + 2 mu_0
print("\nLambda = 1, kappa = -2:", specialize(model, {"Lambda": 1, "kappa": -2}).formatted())
