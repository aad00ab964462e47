"""From a Hoare triple to verification conditions.

The strongest postcondition SP(p, S) and the loop invariant INV(p, S) are
formulas, so a triple {p} S {q} reduces to first-order validity: either one
condition SP(p, S) -> q, or the side conditions of a structural proof.
"""
from whilepa.evaluator import enumerate_satisfying
from whilepa.hoare import (
    Triple, check_triple_on_N, derive, check_derivation, inv, sample_states, sp,
    vc_monolithic, vc_structural, vcs_on_samples,
)
from whilepa.parse import parse_formula, parse_program, parse_triple
from whilepa.smtlib import emit_smtlib
from whilepa.syntax import pretty

S = parse_program("y := 0; while y < x do y := y + 1 od")

# SP(x < 3, S) is satisfied by exactly the reachable final states
f = sp(parse_formula("x < 3"), S)
print(sorted(enumerate_satisfying(f, ["x", "y"], 5, budget=2).satisfying))

# INV(y = 0, loop) describes the loop heads: y <= x
g = inv(parse_formula("y = 0"), S.second)
print(sorted(enumerate_satisfying(g, ["x", "y"], 4, budget=2).satisfying))

t = Triple(*parse_triple("{true} y := 0; while y < x do y := y + 1 od {y = x}"))
print("\nmonolithic:")
for vc in vc_monolithic(t):
    print(" ", vc.name, vc.origin.value)
print("structural:")
for vc in vc_structural(t):
    print(" ", vc.name, vc.origin.value, "|", pretty(vc.body)[:70], "...")

# the derivation behind the structural VCs replays rule by rule
tree, vcs = derive(t)
res = check_derivation(tree)
print("\nderivation ok:", res.ok, "nodes:", tree.size(), "obligations:", len(res.obligations))

# desk-scale semantics: run the program, and test the VCs on sampled states
print(check_triple_on_N(t, bound=6))
print("VCs refuted on samples:", not vcs_on_samples(vcs, sample_states(t, 6))[0])

# a wrong postcondition has a concrete counterexample
bad = Triple(*parse_triple("{true} y := 0; while y < x do y := y + 1 od {y < x}"))
r = check_triple_on_N(bad, bound=6)
print("fails at", r.counterexample, "->", r.output)

# prover export: one (push)(assert (not VC))(check-sat)(pop) block per VC
print()
print(emit_smtlib(vc_monolithic(Triple(*parse_triple("{x = 3} x := x + 1 {x = 4}")))))
