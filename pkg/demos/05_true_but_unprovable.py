"""A triple that holds in N for a reason no finite sample can show.

Take phi(x) bounded, true of every natural, and S any program.  Then
{!phi(x)} S {false} holds vacuously: no state satisfies the precondition.
Whether a given theory proves it depends on whether that theory proves
forall x. phi(x).  Here we check the vacuous verdict on samples and hand
the verification condition to a prover.
"""
from whilepa.hoare import Triple, check_triple_on_N, vc_monolithic
from whilepa.parse import parse_formula, parse_program
from whilepa.smtlib import emit_smtlib, sexprs, solve
from whilepa.syntax import FALSE, Not

# every y <= x is even or odd
phi = parse_formula("forall y < x + 1. exists z < y + 1. (z + z = y | z + z + 1 = y)")
S = parse_program("y := 0; while y < x do y := y + 1 od")
t = Triple(Not(phi), S, FALSE)

r = check_triple_on_N(t, bound=6)
print("holds:", r.holds_on_samples, "vacuous:", r.vacuous)

script = emit_smtlib(vc_monolithic(t))
print(len(sexprs(script)), "top-level commands")
try:
    print("z3:", solve(vc_monolithic(t), timeout_ms=5000))
except RuntimeError as e:
    print(e)
