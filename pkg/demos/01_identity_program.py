"""The identity program, executed and then described by a formula.

    y := 0; while y < x do y := y + 1 od

maps (x, y) to (x, x).  We run it, build its defining formula, and check
that the formula holds at the run's output using witnesses read off the
execution trace.
"""
from whilepa import coding
from whilepa.evaluator import eval_with_witnesses, evaluate, witness_alpha
from whilepa.interpreter import run
from whilepa.parse import parse_program
from whilepa.syntax import pretty
from whilepa.translator import alpha

S = parse_program("y := 0; while y < x do y := y + 1 od")

# Run from x=5, y=9.  The trace keeps every loop-head vector.
out = run(S, {"x": 5, "y": 9})
print("final state:", out.state)
print("loop heads: ", out.trace.loops()[0].heads)

# alpha(S) relates input vector (x, y) to output vector (x', y').
res = alpha(S)
print("\ninputs", res.xvars, "outputs", res.yvars)
print(pretty(res.alpha))

# The loop's existentials are an iteration count i and a beta-code w of the
# loop-head vectors.  witness_alpha builds them from the trace.
wm = witness_alpha(S, out.trace, (5, 9), (5, 5))
for path, value in sorted(wm.items()):
    print("witness at", path, "=", value)

v = {"x": 5, "y": 9, "x'": 5, "y'": 5}
print("\nwitnessed:", eval_with_witnesses(res.alpha, v, wm))

# The same w, decoded: each entry packs one loop-head vector.
w = wm[(0, 0, 1, 0, 0)]
print("decoded heads:", [coding.unpack_vec(c, 2) for c in coding.decode_seq(w, 6)])

# Plain evaluation finds witnesses on its own (the formula carries hints)
# and never accepts a wrong output.
for cand in [(5, 5), (5, 4), (6, 6)]:
    v = {"x": 5, "y": 9, "x'": cand[0], "y'": cand[1]}
    print(cand, evaluate(res.alpha, v, budget=2))
