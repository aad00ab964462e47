"""Labeled programs and Floyd-style obligations.

A while-program flattens to numbered assignments and conditional jumps.
Annotating each label with the assertion the structural proof would use
yields a second set of verification conditions, with the same verdicts.
"""
from whilepa.floyd import compile, derived_annotations, floyd_vcs
from whilepa.hoare import Triple, sample_states, vc_structural, vcs_on_samples
from whilepa.interpreter import run, run_labeled
from whilepa.parse import parse_triple
from whilepa.syntax import pretty

t = Triple(*parse_triple(
    "{true} z := 0; i := 0; while i < y do z := z + x; i := i + 1 od {z = x * y}"))

P = compile(t.prog)
print(pretty(P))
print("labels:", sorted(P.lab()), "exit:", P.exit_label)

# same results as the structured interpreter
s = {"x": 3, "y": 4}
print(run(t.prog, s).state, run_labeled(P, s).state)

# one annotation per label: SP after code, INV at the loop head
P, phi = derived_annotations(t.prog)
for lab in sorted(phi):
    print(lab, pretty(phi[lab])[:60], "...")

floyd = floyd_vcs(P, phi, t.post)
hoare = vc_structural(t)
# a small box and witness budget keep this quick; a refutation needs
# only a reachable bad state, and those come from small inputs
states = sample_states(t, 3)
print("\nFloyd VCs:", len(floyd), "valid on samples:", vcs_on_samples(floyd, states, 2)[0])
print("Hoare VCs:", len(hoare), "valid on samples:", vcs_on_samples(hoare, states, 2)[0])
