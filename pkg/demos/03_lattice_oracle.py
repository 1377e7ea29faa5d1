"""The brute-force reachability oracle, and how it agrees with the criterion."""
from fractions import Fraction as Q

from flagclean import builtin_sl2, is_simple, oracle_grid, submodule_support

# mu = 0 on the line: from e_0 you can only move up, so {w >= 0} is a submodule
print("support generated by e_0 for mu = 0:", sorted(w for (w,) in submodule_support([0], [0], 5)))
print("support generated by e_0 for mu = 1/2:", sorted(w for (w,) in submodule_support([Q(1, 2)], [0], 5)))

for mu in ([Q(1, 2), Q(2, 3)], [Q(1, 2), 2], [Q(-7, 3)]):
    print(f"is_simple({[str(m) for m in mu]}) = {is_simple(mu, 8)}")

rep = oracle_grid(builtin_sl2(), denominator_bound=3, value_range=2, samples=1000, seed=1)
print(f"\n{rep.cases} random grid points: {rep.agreements} agree, {rep.clean_cases} clean")
