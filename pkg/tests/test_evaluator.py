import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import program
from whilepa import coding
from whilepa.evaluator import (
    TraceMismatch, UncoveredVariable, enumerate_satisfying, eval_with_witnesses, evaluate,
    find_witness, witness_alpha,
)
from whilepa.interpreter import eval_term, run
from whilepa.parse import parse_formula, parse_program
from whilepa.syntax import (
    And, BExists, BForall, Eq, Exists, Forall, Iff, Imp, Lt, Not, Or, Var, free_vars,
)
from whilepa.translator import alpha


def truth(f, v, budget=10**5):
    return evaluate(f, v, budget).value


def test_examples():
    assert truth(parse_formula("exists w. beta(w, 0) = 5"), {}, 10**6) is True
    w = coding.encode_seq([0, 1, 2])
    assert truth(parse_formula("forall j < 3. beta(w, j) = j"), {"w": w}) is True
    assert truth(parse_formula("0 = 1"), {}) is False


def test_unbounded_forall_never_true_by_search():
    r = evaluate(parse_formula("forall x. x = x"), {}, budget=50)
    assert r.is_unknown and r.at == ()
    assert truth(parse_formula("forall x. x < 10"), {}, 50) is False


def test_unknown_reports_path():
    r = evaluate(parse_formula("0 = 0 & exists x. x * x = 2"), {}, budget=20)
    assert r.is_unknown
    assert r.at == (1,)


def test_uncovered_variable():
    with pytest.raises(UncoveredVariable):
        evaluate(parse_formula("x = 0"), {})


def test_find_witness():
    f = parse_formula("exists u. u + u = x")
    assert find_witness(f, {"x": 8}) == 4
    assert find_witness(f, {"x": 7}, budget=20) is None


def test_enumerate_satisfying():
    assert enumerate_satisfying(parse_formula("x < 2"), ["x"], 3).satisfying == {(0,), (1,)}
    e = enumerate_satisfying(parse_formula("exists u. u + u = x"), ["x"], 4)
    assert e.satisfying == {(0,), (2,), (4,)}
    # odd x: the search finds no witness, which is Unknown rather than False
    assert e.unknown == {(1,), (3,)}
    assert enumerate_satisfying(parse_formula("0 = 1"), ["x"], 3).satisfying == set()


def test_exact_candidates_refute():
    # the equation pins u, so the search is exact and the answer False
    assert truth(parse_formula("exists u. u = x + 1 & u < x"), {"x": 3}, 0) is False
    assert truth(parse_formula("exists u. (u = 1 | u = 2) & x < u"), {"x": 5}, 0) is False


def test_witness_alpha_ident():
    S = program("ident")
    res = alpha(S)
    out = run(S, {"x": 2, "y": 7})
    wm = witness_alpha(S, out.trace, (2, 7), (2, 2))
    # sequence midpoints, then the loop's i and w below them
    assert wm[()] == 2 and wm[(0,)] == 0
    assert wm[(0, 0, 1, 0)] == 2
    assert wm[(0, 0, 1, 0, 0)] == coding.encode_seq(
        [coding.pack_vec([2, 0]), coding.pack_vec([2, 1]), coding.pack_vec([2, 2])])
    v = {"x": 2, "y": 7, "x'": 2, "y'": 2}
    assert eval_with_witnesses(res.alpha, v, wm).is_true


def test_witness_alpha_zero_iterations():
    S = program("count_up")
    out = run(S, {"x": 9})
    wm = witness_alpha(S, out.trace, (9,), (9,))
    assert wm[(0,)] == 0 and wm[(0, 0)] == coding.encode_seq([9])


def test_witness_alpha_straight_line():
    S = parse_program("x := x + 1; x := x + x")
    out = run(S, {"x": 3})
    wm = witness_alpha(S, out.trace, (3,), (8,))
    assert wm == {(): 4}


def test_wrong_witness_is_never_true():
    S = program("ident")
    res = alpha(S)
    out = run(S, {"x": 5, "y": 9})
    wm = witness_alpha(S, out.trace, (5, 9), (5, 5))
    v = {"x": 5, "y": 9, "x'": 5, "y'": 5}
    assert eval_with_witnesses(res.alpha, v, wm).is_true
    for path in wm:
        bad = dict(wm)
        bad[path] += 1
        assert not eval_with_witnesses(res.alpha, v, bad).is_true


def test_trace_mismatch():
    S = program("ident")
    out = run(program("incr"), {"x": 1})
    with pytest.raises(TraceMismatch):
        witness_alpha(S, out.trace, (1, 0), (1, 1))


def test_empty_witnesses_match_eval_on_delta0():
    f = parse_formula("forall j < x. exists k < j + 1. k + k = j | k + k + 1 = j")
    for x in range(8):
        assert eval_with_witnesses(f, {"x": x}, {}) == evaluate(f, {"x": x})


# reference evaluator for bounded formulas, written independently of the module
def ref(f, v):
    if isinstance(f, Eq):
        return eval_term(f.left, v) == eval_term(f.right, v)
    if isinstance(f, Lt):
        return eval_term(f.left, v) < eval_term(f.right, v)
    if isinstance(f, Not):
        return not ref(f.arg, v)
    if isinstance(f, And):
        return ref(f.left, v) and ref(f.right, v)
    if isinstance(f, Or):
        return ref(f.left, v) or ref(f.right, v)
    if isinstance(f, Imp):
        return (not ref(f.left, v)) or ref(f.right, v)
    if isinstance(f, Iff):
        return ref(f.left, v) == ref(f.right, v)
    n = eval_term(f.bound, v)
    vals = (ref(f.body, {**v, f.var: k}) for k in range(n))
    return all(vals) if isinstance(f, BForall) else any(vals)


def delta0(rng, depth):
    names = ["x", "y", "z"]

    def term(d):
        if d == 0 or rng.random() < 0.4:
            return rng.choice([Var(rng.choice(names)), parse_formula("0 = 1").right,
                               parse_formula("0 = 0").left])
        k = rng.randrange(3)
        a, b = term(d - 1), term(d - 1)
        if k == 2:
            from whilepa.syntax import Ext
            return Ext(rng.choice(["div", "rem", "monus"]), (a, b))
        from whilepa.syntax import Add, Mul
        return (Add if k == 0 else Mul)(a, b)

    def form(d):
        if d == 0 or rng.random() < 0.3:
            return rng.choice([Eq, Lt])(term(2), term(2))
        k = rng.randrange(7)
        if k == 0:
            return Not(form(d - 1))
        if k <= 4:
            return [And, Or, Imp, Iff][k - 1](form(d - 1), form(d - 1))
        v = rng.choice(names)
        bound = term(1)
        while v in free_vars(Eq(bound, bound)):
            bound = term(1)
        return (BForall if k == 5 else BExists)(v, bound, form(d - 1))

    return form(depth)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_delta0_agrees_with_reference(seed):
    rng = random.Random(seed)
    f = delta0(rng, 3)
    v = {n: rng.randint(0, 30) for n in "xyz"}
    assert truth(f, v) == ref(f, v)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 40), st.integers(0, 40))
def test_budget_monotone(x, b):
    f = parse_formula("exists u. exists t. u * u + t = x & t < u + u + 1")
    small, big = evaluate(f, {"x": x}, b), evaluate(f, {"x": x}, b + 50)
    if small.value is not None:
        assert big.value == small.value


def test_forall_refutation_sound():
    f = Forall("u", parse_formula("u < 5"))
    assert truth(f, {}, 10) is False
    assert truth(Exists("u", Eq(Var("u"), Var("u"))), {}, 0) is True
