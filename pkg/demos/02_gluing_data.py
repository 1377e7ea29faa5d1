"""Transition maps, cocycle checks and the line-bundle consistency check."""
import dataclasses

from flagclean import builtin_sl2, check_linebundle, transition, verify_cocycles
from flagclean.symcore import MonomialMap

model = builtin_sl2()
coords, fiber = ("x", "y"), model.fiber.names

for j in (2, 3, 4):
    print(f"Psi_1{j}:", transition(model, 1, j).format(coords, fiber))
# not declared from chart 1; found by composing through chart 1
print("Psi_23:", transition(model, 2, 3).format(coords, fiber))

rep = verify_cocycles(model)
print(f"\n{len(rep.checked)} cocycle conditions checked, {len(rep.failures)} failures")

lb = check_linebundle(model)
for e in lb.entries:
    print(f"  omega_{e.pair[1]}/omega_{e.pair[0]} has exponents {e.derived}; "
          f"central row {e.twist_actual}, expected {e.twist_expected}")

# A wrong coefficient in one declared map breaks every triangle through it.
t21 = model.transitions[(2, 1)]
bad = dict(model.transitions)
bad[(2, 1)] = dataclasses.replace(t21, base=MonomialMap([2, 1], t21.base.exponents))
broken = dataclasses.replace(model, transitions=bad)
print("\nafter changing one coefficient:")
for f in verify_cocycles(broken).failures:
    print("  ", f.detail)
