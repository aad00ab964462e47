"""Arithmetical hierarchy at the bottom: Δ₀, Σ₁ and their normal forms.

``to_sigma1`` pulls every unbounded existential of a generalized Σ₁ formula
to the front, collecting witnesses under a bounded universal into a single
beta-code, and then merges the resulting block into one variable through
pairing.  ``eliminate_extended`` replaces each extended function symbol by a
bounded existential over its Δ₀ graph.
"""
from __future__ import annotations

import enum
from typing import Optional, Sequence

from . import coding
from .evaluator import DEFAULT_BUDGET, evaluate, find_witness
from .interpreter import eval_term
from .syntax import (
    BINARY, ONE, ZERO, Add, And, BExists, BForall, Eq, Exists, Ext, Forall, Formula,
    Iff, Imp, Lt, Mul, Not, Or, Term, Var, all_vars, ext, free_vars, is_pure,
    le, rename_apart, subst, subst_term,
)
from .translator import Fresh


class Klass(enum.Enum):
    Delta0 = "Delta0"
    Sigma1 = "Sigma1"
    GeneralizedSigma1 = "GeneralizedSigma1"
    Other = "Other"


def is_delta0(f: Formula) -> bool:
    if isinstance(f, (Eq, Lt)):
        return True
    if isinstance(f, Not):
        return is_delta0(f.arg)
    if isinstance(f, BINARY):
        return is_delta0(f.left) and is_delta0(f.right)
    if isinstance(f, (BForall, BExists)):
        return is_delta0(f.body)
    return False


def _gen_sigma1(f: Formula) -> bool:
    if is_delta0(f):
        return True
    if isinstance(f, (And, Or)):
        return _gen_sigma1(f.left) and _gen_sigma1(f.right)
    if isinstance(f, Imp):
        return is_delta0(f.left) and _gen_sigma1(f.right)
    if isinstance(f, (Exists, BExists, BForall)):
        return _gen_sigma1(f.body)
    return False


def classify(f: Formula) -> Klass:
    """The most specific of Delta0 ⊂ Sigma1 ⊂ GeneralizedSigma1, else Other."""
    if is_delta0(f):
        return Klass.Delta0
    if isinstance(f, Exists) and is_delta0(f.body):
        return Klass.Sigma1
    if _gen_sigma1(f):
        return Klass.GeneralizedSigma1
    return Klass.Other


# ---------------------------------------------------------------------------
# Normalization


class NotSigma1(ValueError):
    pass


def _pull(f: Formula, fresh: Fresh) -> tuple[list[str], Formula]:
    """Prefix variables and Δ₀ matrix; ``f`` must be renamed apart."""
    if is_delta0(f):
        return [], f
    if isinstance(f, (And, Or)):
        va, ma = _pull(f.left, fresh)
        vb, mb = _pull(f.right, fresh)
        return va + vb, type(f)(ma, mb)
    if isinstance(f, Imp):
        vb, mb = _pull(f.right, fresh)
        return vb, Imp(f.left, mb)
    if isinstance(f, Exists):
        vs, m = _pull(f.body, fresh)
        return [f.var] + vs, m
    if isinstance(f, BExists):
        vs, m = _pull(f.body, fresh)
        return [f.var] + vs, And(Lt(Var(f.var), f.bound), m)
    if isinstance(f, BForall):
        # collection: one beta-code per variable pulled out of the body
        vs, m = _pull(f.body, fresh)
        codes = [fresh("c") for _ in vs]
        sigma = {v: ext("beta", Var(c), Var(f.var)) for v, c in zip(vs, codes)}
        return codes, BForall(f.var, f.bound, subst(m, sigma))
    raise NotSigma1(f"not generalized Σ₁: {type(f).__name__}")


def _width(f: Formula) -> int:
    if is_delta0(f):
        return 0
    if isinstance(f, (And, Or)):
        return _width(f.left) + _width(f.right)
    if isinstance(f, (Imp)):
        return _width(f.right)
    if isinstance(f, (Exists, BExists)):
        return 1 + _width(f.body)
    return _width(f.body)


class Sigma1Hint:
    """Proposes the merged witness by collecting witnesses of the original
    (renamed-apart) formula."""

    __slots__ = ("source", "k")

    def __init__(self, source: Formula, k: int):
        self.source = source
        self.k = k

    def substitute(self, sigma) -> "Sigma1Hint":
        return Sigma1Hint(subst(self.source, sigma), self.k)

    def __call__(self, env, budget: int = DEFAULT_BUDGET) -> Optional[int]:
        try:
            vals = _extract(self.source, dict(env), budget)
        except (KeyError, ValueError):
            return None
        if vals is None:
            return None
        if len(vals) != self.k:
            return None
        if self.k == 0:
            return 0
        return _pack_tree(vals)


def _pack_tree(vals: Sequence[int]) -> int:
    # balanced, so a big witness is squared log2(k) times rather than k-1
    if len(vals) == 1:
        return vals[0]
    h = len(vals) // 2
    return coding.pair(_pack_tree(vals[:h]), _pack_tree(vals[h:]))


def _tree_terms(w: Term, k: int) -> list[Term]:
    if k == 1:
        return [w]
    h = k // 2
    return _tree_terms(Ext("L", (w,)), h) + _tree_terms(Ext("R", (w,)), k - h)


def _extract(f: Formula, env: dict, budget: int) -> Optional[list[int]]:
    """Values for the prefix variables of ``_pull(f)`` making its matrix true."""
    if is_delta0(f):
        return [] if evaluate(f, env, budget).is_true else None
    if isinstance(f, And):
        a = _extract(f.left, env, budget)
        if a is None:
            return None
        b = _extract(f.right, env, budget)
        return None if b is None else a + b
    if isinstance(f, Or):
        a = _extract(f.left, env, budget)
        if a is not None:
            return a + [0] * _width(f.right)
        b = _extract(f.right, env, budget)
        return None if b is None else [0] * _width(f.left) + b
    if isinstance(f, Imp):
        cond = evaluate(f.left, env, budget)
        if cond.is_false:
            return [0] * _width(f.right)
        return _extract(f.right, env, budget)
    if isinstance(f, Exists):
        sub = {x: env[x] for x in free_vars(f) if x in env}
        k = find_witness(f, sub, budget)
        if k is None:
            return None
        rest = _extract(f.body, {**env, f.var: k}, budget)
        return None if rest is None else [k] + rest
    if isinstance(f, BExists):
        n = eval_term(f.bound, env)
        for k in range(n):
            rest = _extract(f.body, {**env, f.var: k}, budget)
            if rest is not None:
                return [k] + rest
        return None
    if isinstance(f, BForall):
        n = eval_term(f.bound, env)
        rows = []
        for k in range(n):
            r = _extract(f.body, {**env, f.var: k}, budget)
            if r is None:
                return None
            rows.append(r)
        width = _width(f.body)
        if n == 0:
            return [0] * width
        return [coding.encode_seq([row[m] for row in rows]) for m in range(width)]
    return None


def to_sigma1(f: Formula) -> Formula:
    """An equivalent formula of shape ``exists w. M`` with ``M`` Δ₀.

    Unbounded existentials are pulled out left to right; ``k >= 2`` of them
    are merged into ``w``, read back through a balanced tree of ``L``/``R``
    terms (``L(L(w)), R(L(w)), L(R(w)), ...``).
    """
    if classify(f) is Klass.Other:
        raise NotSigma1("input is not generalized Σ₁")
    src = rename_apart(f)
    fresh = Fresh(all_vars(src))
    vs, m = _pull(src, fresh)
    hint = Sigma1Hint(src, len(vs))
    if not vs:
        d = fresh("d")
        return Exists(d, And(Eq(Var(d), Var(d)), m), hint)
    if len(vs) == 1:
        return Exists(vs[0], m, hint)
    w = fresh("w")
    sigma = dict(zip(vs, _tree_terms(Var(w), len(vs))))
    return Exists(w, subst(m, sigma), hint)


# ---------------------------------------------------------------------------
# Extended symbols as Δ₀ graphs


def _graph(fn: str, v: Term, args: Sequence[Term], fresh: Fresh) -> tuple[Formula, Term]:
    """Graph of ``v = fn(args)`` and a bound term with ``v <= bound``."""
    def pair_eq(z: Term, x: Term, y: Term) -> Formula:
        # z = pair(x, y)  <=>  z + z = (x+y+1)(x+y) + y + y
        s = Add(x, y)
        return Eq(Add(z, z), Add(Add(Mul(Add(s, ONE), s), y), y))

    def rem_graph(r: Term, x: Term, y: Term) -> Formula:
        q = fresh("q")
        return Or(And(Eq(y, ZERO), Eq(r, x)),
                  And(Not(Eq(y, ZERO)),
                      And(Lt(r, y), BExists(q, Add(x, ONE), Eq(Add(Mul(Var(q), y), r), x)))))

    if fn == "div":
        x, y = args
        return (Or(And(Eq(y, ZERO), Eq(v, ZERO)),
                   And(Not(Eq(y, ZERO)),
                       And(le(Mul(v, y), x), Lt(x, Mul(Add(v, ONE), y))))), x)
    if fn == "rem":
        x, y = args
        return rem_graph(v, x, y), x
    if fn == "monus":
        x, y = args
        return (Or(And(le(y, x), Eq(x, Add(y, v))),
                   And(Not(le(y, x)), Eq(v, ZERO)))), x
    if fn == "sqrt":
        (x,) = args
        return And(le(Mul(v, v), x), Lt(x, Mul(Add(v, ONE), Add(v, ONE)))), x
    if fn == "pair":
        x, y = args
        s1 = Add(Add(x, y), ONE)
        return pair_eq(v, x, y), Mul(s1, s1)
    if fn in ("L", "R"):
        (z,) = args
        o = fresh("o")
        g = pair_eq(z, v, Var(o)) if fn == "L" else pair_eq(z, Var(o), v)
        return BExists(o, Add(z, ONE), g), z
    if fn == "beta":
        w, i = args
        a, b = fresh("a"), fresh("b")
        modulus = Add(Mul(Var(b), Add(i, ONE)), ONE)
        body = And(pair_eq(w, Var(a), Var(b)), rem_graph(v, Var(a), modulus))
        return BExists(a, Add(w, ONE), BExists(b, Add(w, ONE), body)), w
    raise ValueError(f"unknown extended function {fn!r}")


def _innermost_ext(t: Term) -> Optional[Ext]:
    if isinstance(t, Ext):
        for a in t.args:
            e = _innermost_ext(a)
            if e is not None:
                return e
        return t
    if isinstance(t, (Add, Mul)):
        return _innermost_ext(t.left) or _innermost_ext(t.right)
    return None


def _replace(t: Term, target: Ext, v: Term) -> Term:
    if t == target:
        return v
    if isinstance(t, Add):
        return Add(_replace(t.left, target, v), _replace(t.right, target, v))
    if isinstance(t, Mul):
        return Mul(_replace(t.left, target, v), _replace(t.right, target, v))
    if isinstance(t, Ext):
        return Ext(t.fn, tuple(_replace(a, target, v) for a in t.args))
    return t


def eliminate_extended(f: Formula) -> Formula:
    """An equivalent formula over the pure signature.

    Each application ``fn(a)`` (innermost first) becomes a fresh ``v`` bound
    by ``exists v < bound + 1. graph(v, a) & ...``.  Since every graph is
    the graph of a total function this is sound under any context.
    """
    fresh = Fresh(all_vars(f))
    return _elim(f, fresh)


def _elim_atom(terms: list[Term], rebuild, fresh: Fresh) -> Formula:
    for t in terms:
        e = _innermost_ext(t)
        if e is not None:
            v = fresh("v")
            graph, bound = _graph(e.fn, Var(v), e.args, fresh)
            inner = _elim_atom([_replace(s, e, Var(v)) for s in terms], rebuild, fresh)
            return BExists(v, Add(bound, ONE), And(graph, inner))
    return rebuild(*terms)


def _elim(f: Formula, fresh: Fresh) -> Formula:
    if isinstance(f, (Eq, Lt)):
        if is_pure(f.left) and is_pure(f.right):
            return f
        return _elim_atom([f.left, f.right], type(f), fresh)
    if isinstance(f, Not):
        return Not(_elim(f.arg, fresh))
    if isinstance(f, BINARY):
        return type(f)(_elim(f.left, fresh), _elim(f.right, fresh))
    if isinstance(f, Exists):
        return Exists(f.var, _elim(f.body, fresh), f.hint)
    if isinstance(f, Forall):
        return Forall(f.var, _elim(f.body, fresh))
    if isinstance(f, (BForall, BExists)):
        body = _elim(f.body, fresh)
        if is_pure(f.bound):
            return type(f)(f.var, f.bound, body)
        return _elim_atom([f.bound], lambda b: type(f)(f.var, b, body), fresh)
    raise TypeError(f"not a formula: {f!r}")
