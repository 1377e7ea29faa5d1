"""Coset identities in the loop group, checked with truncated Laurent series."""
from flagclean import builtin_sl2, coset_equal, verify_fixtures
from flagclean.loopgroup import LoopMatrix

g1 = LoopMatrix.from_exprs([["a_0", "1"], ["-1", "0"]], ["a_0"])
g2 = LoopMatrix.from_exprs([["1", "0"], ["-1/a_0", "1"]], ["a_0"])
v = coset_equal(g1, g2, "I")
print("g1 I == g2 I ?", v.status)
print("quotient g2^-1 g1 =", v.quotient.to_exprs())
print("valid where none of these vanish:", sorted(v.denominators_used))

rep = verify_fixtures(builtin_sl2().fixtures, precision=8)
print()
for fx, verdict in rep.results:
    cert = f" {verdict.certificate}" if verdict.certificate else ""
    print(f"  {fx.name:<20} {fx.subgroup:<2} {verdict.status}{cert}")
