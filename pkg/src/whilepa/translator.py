"""Defining formulas of while-programs.

``alpha(S)`` builds a formula over ``x⃗ ++ y⃗`` that holds in the standard
model exactly when running ``S`` from ``x⃗`` stops in ``y⃗``.  Loops are
expressed through beta-coded sequences of loop-head vectors, so the result
is generalized Σ₁; :func:`whilepa.sigma1.to_sigma1` folds it into one
existential.

Layout of the generated formulas (the evaluator's witness paths rely on it)::

    assign   y1 = e1 & (y2 = e2 & ...)
    seq      exists z1. ... exists zn. (alpha1(x, z) & alpha2(z, y))
    if       (B(x) & alpha1) | (!B(x) & alpha2)
    while    (exists i. exists w. C(i, w, x, y)) & !B(y)
    C        x = <(w)_0> & ((forall j < i. B(<(w)_j>) & alpha0(<(w)_j>, <(w)_j+1>)) & y = <(w)_i>)

Every sub-formula is built over the vector of the *whole* program, and the
constructions are parametric in terms, so ``alpha0`` can be instantiated
directly at ``<(w)_j>``.

Existentials carry hints that run the interpreter to propose witnesses.  A
hint is only a suggestion: the evaluator re-checks the body, so a wrong
hint can cost time but never change an answer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from . import coding
from .interpreter import (
    UnboundVariable, eval_term, iterate, loop_heads, run_vector,
)
from .syntax import (
    ONE, ZERO, Add, And, Assign, BForall, Eq, Exists, Formula, If, Not, Or,
    Program, Seq, Term, Var, While, conj, ext, num, pvars, subst, subst_term,
    term_vars, vec_eq,
)

HINT_FUEL = 10**5
HEAD_LIMIT = 10**4

TermLike = Union[str, int, Term]


def _t(x: TermLike) -> Term:
    if isinstance(x, str):
        return Var(x)
    return num(x) if isinstance(x, int) else x


class Fresh:
    """Generator of ``$``-prefixed names, never returning one in ``avoid``."""

    def __init__(self, avoid: Iterable[str] = (), start: int = 0):
        self.avoid = set(avoid)
        self.n = start

    def __call__(self, base: str) -> str:
        while True:
            name = f"${base}{self.n}"
            self.n += 1
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def primed(variables: Sequence[str]) -> list[str]:
    """Output-vector names: ``x`` becomes ``x'`` (more primes on a clash)."""
    taken = set(variables)
    out = []
    for x in variables:
        cand = x + "'"
        while cand in taken:
            cand += "'"
        taken.add(cand)
        out.append(cand)
    return out


def unpack_terms(t: Term, n: int) -> list[Term]:
    """Terms for the components of the ``n``-tuple coded by ``t``."""
    if n < 1:
        raise ValueError("arity must be positive")
    out = []
    for _ in range(n - 1):
        out.append(ext("L", t))
        t = ext("R", t)
    out.append(t)
    return out


def pack_term(ts: Sequence[Term]) -> Term:
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = ext("pair", t, out)
    return out


# ---------------------------------------------------------------------------
# Witness hints


class _Runner:
    """Cached interpreter runs of one program fragment."""

    def __init__(self, prog: Program, variables: Sequence[str], fuel: int):
        self.prog = prog
        self.variables = tuple(variables)
        self.fuel = fuel
        self._out: dict = {}
        self._heads: dict = {}
        self._iter: dict = {}

    @property
    def n(self) -> int:
        return len(self.variables)

    def output(self, a: tuple) -> Optional[tuple]:
        if a not in self._out:
            self._out[a] = run_vector(self.prog, a, self.variables, self.fuel)
        return self._out[a]

    def heads(self, a: tuple) -> list[tuple]:
        if a not in self._heads:
            hs, _ = loop_heads(self.prog, a, self.variables, self.fuel, limit=HEAD_LIMIT)
            self._heads[a] = hs
        return self._heads[a]

    def iterate(self, a: tuple, k: int) -> Optional[list[tuple]]:
        key = (a, k)
        if key not in self._iter:
            self._iter[key] = iterate(self.prog, a, k, self.variables, self.fuel)
        return self._iter[key]


def _code(vectors: Sequence[tuple]) -> int:
    return coding.encode_seq([coding.pack_vec(v) for v in vectors])


class Hint:
    """Base class: evaluates its terms and hands the values to ``propose``."""

    __slots__ = ("runner", "terms", "k")

    def __init__(self, runner: _Runner, terms: Sequence[Term], k: int = 0):
        self.runner = runner
        self.terms = tuple(terms)
        self.k = k

    def substitute(self, sigma) -> "Hint":
        return type(self)(self.runner, [subst_term(t, sigma) for t in self.terms], self.k)

    def __call__(self, env, budget: int = 0) -> Optional[int]:
        try:
            vals = [eval_term(t, env) for t in self.terms]
        except UnboundVariable:
            return None
        return self.propose(vals)

    def propose(self, vals: list[int]) -> Optional[int]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.k})"


class SeqMid(Hint):
    """Component ``k`` of the state after the first half of a sequence."""

    def propose(self, vals):
        out = self.runner.output(tuple(vals))
        return None if out is None else out[self.k]


class LoopIndex(Hint):
    """Number of iterations leading from ``x⃗`` to ``y⃗``."""

    def propose(self, vals):
        n = self.runner.n
        a, b = tuple(vals[:n]), tuple(vals[n:])
        try:
            return self.runner.heads(a).index(b)
        except ValueError:
            return None


class LoopCode(Hint):
    """Code of the first ``i + 1`` loop-head vectors."""

    def propose(self, vals):
        n = self.runner.n
        a, i = tuple(vals[:n]), vals[n]
        hs = self.runner.heads(a)
        if i >= len(hs):
            return None
        return _code(hs[: i + 1])


class PhiCode(Hint):
    """Code of ``y`` unguarded iterations of a loop body."""

    def propose(self, vals):
        n = self.runner.n
        a, k = tuple(vals[:n]), vals[n]
        if k > HEAD_LIMIT:
            return None
        seq = self.runner.iterate(a, k)
        return None if seq is None else _code(seq)


# ---------------------------------------------------------------------------
# Construction


class _Builder:
    def __init__(self, variables: Sequence[str], fresh: Fresh, fuel: int = HINT_FUEL):
        self.variables = list(variables)
        self.fresh = fresh
        self.fuel = fuel
        self._runners: dict[int, tuple[Program, _Runner]] = {}

    def runner(self, p: Program) -> _Runner:
        hit = self._runners.get(id(p))
        if hit is None or hit[0] is not p:
            hit = (p, _Runner(p, self.variables, self.fuel))
            self._runners[id(p)] = hit
        return hit[1]

    def sigma(self, xs: Sequence[Term]) -> dict[str, Term]:
        return dict(zip(self.variables, xs))

    def guard(self, b: Formula, xs: Sequence[Term]) -> Formula:
        return subst(b, self.sigma(xs))

    def coded(self, w: Term, j: Term) -> list[Term]:
        return unpack_terms(ext("beta", w, j), len(self.variables))

    def alpha(self, S: Program, xs: Sequence[Term], ys: Sequence[Term]) -> Formula:
        if isinstance(S, Assign):
            e = subst_term(S.expr, self.sigma(xs))
            parts = [Eq(y, e) if v == S.var else Eq(y, x)
                     for v, x, y in zip(self.variables, xs, ys)]
            return conj(parts)
        if isinstance(S, Seq):
            zs = [self.fresh("z") for _ in self.variables]
            zt = [Var(z) for z in zs]
            body: Formula = And(self.alpha(S.first, xs, zt), self.alpha(S.second, zt, ys))
            r = self.runner(S.first)
            for k in reversed(range(len(zs))):
                body = Exists(zs[k], body, SeqMid(r, xs, k))
            return body
        if isinstance(S, If):
            b = self.guard(S.cond, xs)
            return Or(And(b, self.alpha(S.then, xs, ys)),
                      And(Not(b), self.alpha(S.orelse, xs, ys)))
        if isinstance(S, While):
            i = self.fresh("i")
            star = self.alpha_star(S, Var(i), xs, ys)
            r = self.runner(S)
            return And(Exists(i, star, LoopIndex(r, list(xs) + list(ys))),
                       Not(self.guard(S.cond, ys)))
        raise TypeError(f"not a program: {S!r}")

    def c_formula(self, S: While, i: Term, w: str, xs, ys) -> Formula:
        j = self.fresh("j")
        wt, jt = Var(w), Var(j)
        cur, nxt = self.coded(wt, jt), self.coded(wt, Add(jt, ONE))
        step = And(self.guard(S.cond, cur), self.alpha(S.body, cur, nxt))
        return And(vec_eq(xs, self.coded(wt, ZERO)),
                   And(BForall(j, i, step), vec_eq(ys, self.coded(wt, i))))

    def alpha_star(self, S: While, i: Term, xs, ys) -> Formula:
        w = self.fresh("w")
        return Exists(w, self.c_formula(S, i, w, xs, ys),
                      LoopCode(self.runner(S), list(xs) + [i]))

    def phi(self, S0: Program, xs, y: Term, zs) -> Formula:
        w, j = self.fresh("w"), self.fresh("j")
        wt, jt = Var(w), Var(j)
        body = And(vec_eq(self.coded(wt, ZERO), xs),
                   And(BForall(j, y, self.alpha(S0, self.coded(wt, jt),
                                                self.coded(wt, Add(jt, ONE)))),
                       vec_eq(self.coded(wt, y), zs)))
        return Exists(w, body, PhiCode(self.runner(S0), list(xs) + [y]))


@dataclass
class AlphaResult:
    alpha: Formula
    xvars: list[str]
    yvars: list[str]
    fresh: int

    def __iter__(self):
        return iter((self.alpha, self.xvars, self.yvars))


def _setup(prog: Program, variables, fresh, extra: Iterable[Term] = ()):
    variables = pvars(prog) if variables is None else list(variables)
    missing = set(pvars(prog)) - set(variables)
    if missing:
        raise ValueError(f"variable vector lacks {sorted(missing)}")
    if fresh is None:
        avoid = set(variables)
        for t in extra:
            avoid |= term_vars(t)
        fresh = Fresh(avoid)
    return variables, fresh


def alpha(S: Program, variables: Optional[Sequence[str]] = None,
          fresh: Optional[Fresh] = None, fuel: int = HINT_FUEL) -> AlphaResult:
    """``alpha_S(x⃗, y⃗)`` with ``x⃗ = pvars(S)`` and ``y⃗`` the primed copies."""
    variables, fresh = _setup(S, variables, fresh)
    ys = primed(variables)
    fresh.avoid |= set(ys)
    f = _Builder(variables, fresh, fuel).alpha(S, [Var(x) for x in variables],
                                               [Var(y) for y in ys])
    return AlphaResult(f, list(variables), ys, fresh.n)


def alpha_formula(S: Program, xs: Sequence[TermLike], ys: Sequence[TermLike],
                  variables: Optional[Sequence[str]] = None,
                  fresh: Optional[Fresh] = None, fuel: int = HINT_FUEL) -> Formula:
    """``alpha_S`` instantiated at arbitrary term vectors."""
    xs, ys = [_t(x) for x in xs], [_t(y) for y in ys]
    variables, fresh = _setup(S, variables, fresh, xs + ys)
    _check_len(variables, xs, ys)
    return _Builder(variables, fresh, fuel).alpha(S, xs, ys)


def alpha_star(S: While, ivar: TermLike, xvec: Sequence[TermLike], yvec: Sequence[TermLike],
               variables: Optional[Sequence[str]] = None,
               fresh: Optional[Fresh] = None, fuel: int = HINT_FUEL) -> Formula:
    """``exists w. C_S(i, w, x⃗, y⃗)``."""
    if not isinstance(S, While):
        raise TypeError("alpha_star needs a loop")
    xs, ys, i = [_t(x) for x in xvec], [_t(y) for y in yvec], _t(ivar)
    variables, fresh = _setup(S, variables, fresh, xs + ys + [i])
    _check_len(variables, xs, ys)
    return _Builder(variables, fresh, fuel).alpha_star(S, i, xs, ys)


def exists_iterations(S: While, xvec: Sequence[TermLike], yvec: Sequence[TermLike],
                      variables: Optional[Sequence[str]] = None,
                      fresh: Optional[Fresh] = None, fuel: int = HINT_FUEL) -> Formula:
    """``exists i. alpha_S*(i, x⃗, y⃗)``: ``y⃗`` is some loop-head vector."""
    xs, ys = [_t(x) for x in xvec], [_t(y) for y in yvec]
    variables, fresh = _setup(S, variables, fresh, xs + ys)
    _check_len(variables, xs, ys)
    b = _Builder(variables, fresh, fuel)
    i = fresh("i")
    return Exists(i, b.alpha_star(S, Var(i), xs, ys), LoopIndex(b.runner(S), xs + ys))


def c_formula(S: While, ivar: TermLike, wvar: str, xvec, yvec,
              variables: Optional[Sequence[str]] = None,
              fresh: Optional[Fresh] = None) -> Formula:
    xs, ys, i = [_t(x) for x in xvec], [_t(y) for y in yvec], _t(ivar)
    variables, fresh = _setup(S, variables, fresh, xs + ys + [i, Var(wvar)])
    _check_len(variables, xs, ys)
    return _Builder(variables, fresh).c_formula(S, i, wvar, xs, ys)


def phi(S0: Program, xvec: Sequence[TermLike], yvar: TermLike, zvec: Sequence[TermLike],
        variables: Optional[Sequence[str]] = None,
        fresh: Optional[Fresh] = None, fuel: int = HINT_FUEL) -> Formula:
    """``phi_S0(x⃗, y, z⃗)``: ``y`` unguarded body runs lead from ``x⃗`` to ``z⃗``."""
    xs, zs, y = [_t(x) for x in xvec], [_t(z) for z in zvec], _t(yvar)
    variables, fresh = _setup(S0, variables, fresh, xs + zs + [y])
    _check_len(variables, xs, zs)
    return _Builder(variables, fresh, fuel).phi(S0, xs, y, zs)


def _check_len(variables, xs, ys) -> None:
    if not (len(variables) == len(xs) == len(ys)):
        raise ValueError("vector length mismatch")
