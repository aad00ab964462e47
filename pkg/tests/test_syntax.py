import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from whilepa.parse import (
    ParseError, parse_bool, parse_formula, parse_labeled, parse_program, parse_term,
    parse_triple,
)
from whilepa.syntax import (
    ONE, ZERO, Add, And, Assign, BForall, Eq, Exists, Ext, Imp, Lt, Mul, Not, Num, Seq, Var,
    While, embed, free_vars, pretty, pvars, rename_apart, subst,
)

seeds = st.integers(0, 2**32)
x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_programs():
    assert parse_program("x:=x") == Assign("x", x)
    assert parse_program("while !(x<x) do x:=x od") == While(Not(Lt(x, x)), Assign("x", x))
    assert parse_program("y := 0; y := 1") == Seq(Assign("y", ZERO), Assign("y", ONE))


def test_seq_is_right_associative():
    a, b, c = (Assign(v, ZERO) for v in "abc")
    assert parse_program("a := 0; b := 0; c := 0") == Seq(a, Seq(b, c))
    assert parse_program("(a := 0; b := 0); c := 0") == Seq(Seq(a, b), c)
    assert parse_program(pretty(Seq(Seq(a, b), c))) == Seq(Seq(a, b), c)


def test_parse_formulas():
    assert parse_formula("y = x + 1") == Eq(y, Add(x, ONE))
    w = Var("w")
    assert parse_formula("exists w. beta(w,0) = x") == Exists("w", Eq(Ext("beta", (w, ZERO)), x))
    j = Var("j")
    assert parse_formula("forall j<i. (w)_j = (w')_j") == BForall(
        "j", Var("i"), Eq(Ext("beta", (w, j)), Ext("beta", (Var("w'"), j))))


def test_numerals_and_precedence():
    assert parse_term("3") == Num(3)
    assert parse_term("0") == ZERO and parse_term("1") == ONE
    assert parse_term("x + y * z") == Add(x, Mul(y, z))
    assert parse_term("(x + y) * z") == Mul(Add(x, y), z)
    assert parse_formula("true") == Eq(ZERO, ZERO)
    assert parse_formula("false") == Eq(ZERO, ONE)


@pytest.mark.parametrize("text", [
    "x :=",
    "$w := 1",
    "x := div(x, 1)",
    "if x < y then x := 1 fi",
    "x := 1 & 2",
    "while x < y do x := x + 1",
    "x := x ;",
])
def test_malformed_programs(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_program("x := 1 & 2")
    assert "1:8" in str(e.value)


def test_guards_use_only_lt_not_imp():
    with pytest.raises(ParseError):
        parse_bool("x < y & y < z")
    assert parse_bool("x < y -> !(y < x)") == Imp(Lt(x, y), Not(Lt(y, x)))


def test_internal_names_opt_in():
    with pytest.raises(ParseError):
        parse_formula("$u = 0")
    assert parse_formula("$u = 0", allow_internal=True) == Eq(Var("$u"), ZERO)


def test_pvars():
    ident = parse_program("y := 0; while y < x do y := y + 1 od")
    assert pvars(ident) == ["x", "y"]
    assert pvars(Assign("x", ZERO)) == ["x"]
    assert pvars(parse_program("b := a; a := b")) == ["a", "b"]


def test_embed_is_identity_on_guards():
    b = parse_bool("!(x < y) -> y < x")
    assert embed(b) == b


def test_triple_and_labeled():
    pre, prog, post = parse_triple("{x = 3} x := x + 1 {x = 4}")
    assert prog == Assign("x", Add(x, ONE)) and post == Eq(x, Num(4))
    P = parse_labeled("0: y := 0\n1: if !(y < x) goto 4\n2: y := y + 1\n3: if 0 < 1 goto 1")
    assert P.labels == [0, 1, 2, 3] and P.exit_label == 4
    assert P.lab() == {0, 1, 2, 3, 4}


def test_substitution_avoids_capture():
    f = Exists("y", Eq(x, y))
    g = subst(f, {"x": y})
    assert isinstance(g, Exists) and g.var != "y"
    assert free_vars(g) == {"y"}


def test_rename_apart_keeps_free_vars():
    f = And(Exists("x", Eq(x, y)), Eq(x, ZERO))
    g = rename_apart(f, {"x"})
    assert free_vars(g) == free_vars(f)


@settings(max_examples=200)
@given(seeds)
def test_round_trip_terms(seed):
    t = gen.term(random.Random(seed), 4)
    assert parse_term(pretty(t)) == t


@settings(max_examples=200)
@given(seeds)
def test_round_trip_formulas(seed):
    f = gen.formula(random.Random(seed), 4)
    assert parse_formula(pretty(f)) == f


@settings(max_examples=200)
@given(seeds)
def test_round_trip_programs(seed):
    s = gen.program(random.Random(seed), 4)
    back = parse_program(pretty(s))
    assert back == s
    assert pvars(back) == pvars(s)


@settings(max_examples=100)
@given(seeds)
def test_round_trip_labeled(seed):
    P = gen.labeled(random.Random(seed))
    assert parse_labeled(pretty(P)) == P
