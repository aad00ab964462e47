"""Deciding formulas in the standard model.

Bounded quantifiers are enumerated exactly.  An unbounded existential is
settled, in order, by an explicit witness, by a proposal from the node's
``hint``, by one of a few sound exact rules, and finally by a search over
``0..budget``.  Search can only confirm an existential or refute a
universal; everything else that runs out of budget is ``Unknown``.

Paths address subformulas: ``0``/``1`` select the children of a connective
(``0`` for the argument of a negation), ``0`` the body of an unbounded
quantifier, and ``k`` the body of a bounded quantifier at instance ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .interpreter import eval_term
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Forall, Formula, Iff, Imp, Lt, Not,
    Or, Term, Var, free_vars, term_vars, walk,
)

DEFAULT_BUDGET = 10**5

Path = tuple[int, ...]
WitnessMap = dict[Path, int]


@dataclass(frozen=True)
class EvalOutcome:
    value: Optional[bool]
    at: Optional[Path] = None

    @property
    def is_true(self) -> bool:
        return self.value is True

    @property
    def is_false(self) -> bool:
        return self.value is False

    @property
    def is_unknown(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        if self.value is None:
            return f"Unknown(at={'.'.join(map(str, self.at or ())) or 'root'})"
        return "True" if self.value else "False"


TRUE = EvalOutcome(True)
FALSE = EvalOutcome(False)


def Unknown(at: Path) -> EvalOutcome:
    return EvalOutcome(None, at)


class UncoveredVariable(ValueError):
    pass


class _Eval:
    def __init__(self, budget: int, witnesses: Optional[Mapping[Path, int]],
                 use_hints: bool):
        if budget < 0:
            raise ValueError("budget must be non-negative")
        self.budget = budget
        self.witnesses = witnesses or {}
        self.use_hints = use_hints
        self._fv: dict[int, tuple[Formula, frozenset]] = {}
        self._qf: dict[int, tuple[Formula, bool]] = {}
        # results of unbounded quantifier nodes, keyed by node, path and the
        # values of the node's free variables; evaluation is a pure function
        # of these, so repeated subproblems (common in SP) are solved once
        self._memo: dict[tuple, tuple[Formula, EvalOutcome]] = {}

    def free(self, f: Formula) -> frozenset:
        hit = self._fv.get(id(f))
        if hit is None or hit[0] is not f:
            hit = (f, free_vars(f))
            self._fv[id(f)] = hit
        return hit[1]

    def quantifier_free(self, f: Formula) -> bool:
        """No unbounded quantifier inside ``f`` (cheap to decide)."""
        hit = self._qf.get(id(f))
        if hit is None or hit[0] is not f:
            hit = (f, not any(isinstance(g, (Exists, Forall)) for g in walk(f)))
            self._qf[id(f)] = hit
        return hit[1]

    def term(self, t: Term, env: dict) -> int:
        return eval_term(t, env)

    def run(self, f: Formula, env: dict, path: Path) -> EvalOutcome:
        if isinstance(f, Eq):
            return TRUE if self.term(f.left, env) == self.term(f.right, env) else FALSE
        if isinstance(f, Lt):
            return TRUE if self.term(f.left, env) < self.term(f.right, env) else FALSE
        if isinstance(f, Not):
            r = self.run(f.arg, env, path + (0,))
            return r if r.value is None else (FALSE if r.value else TRUE)
        if isinstance(f, And):
            return self.conj(f, env, path)
        if isinstance(f, Or):
            a = self.run(f.left, env, path + (0,))
            if a.value is True:
                return TRUE
            b = self.run(f.right, env, path + (1,))
            if b.value is True:
                return TRUE
            if a.value is False and b.value is False:
                return FALSE
            return a if a.value is None else b
        if isinstance(f, Imp):
            # consequent first: it is usually the cheap side of a VC
            b = self.run(f.right, env, path + (1,))
            if b.value is True:
                return TRUE
            a = self.run(f.left, env, path + (0,))
            if a.value is False:
                return TRUE
            if a.value is True and b.value is False:
                return FALSE
            return a if a.value is None else b
        if isinstance(f, Iff):
            a = self.run(f.left, env, path + (0,))
            if a.value is None:
                return a
            b = self.run(f.right, env, path + (1,))
            if b.value is None:
                return b
            return TRUE if a.value == b.value else FALSE
        if isinstance(f, BForall):
            return self.bounded(f, env, path, universal=True)
        if isinstance(f, BExists):
            return self.bounded(f, env, path, universal=False)
        if isinstance(f, (Forall, Exists)):
            return self.memo(f, env, path)
        raise TypeError(f"not a formula: {f!r}")

    def conj(self, f: And, env: dict, path: Path) -> EvalOutcome:
        first, second = (0, 1)
        if self.quantifier_free(f.right) and not self.quantifier_free(f.left):
            first, second = 1, 0
        parts = (f.left, f.right)
        a = self.run(parts[first], env, path + (first,))
        if a.value is False:
            return FALSE
        b = self.run(parts[second], env, path + (second,))
        if b.value is False:
            return FALSE
        if a.value is True and b.value is True:
            return TRUE
        if first == 1:
            a, b = b, a
        return a if a.value is None else b

    def with_var(self, f: Formula, x: str, k: int, env: dict, path: Path) -> EvalOutcome:
        missing = object()
        old = env.get(x, missing)
        env[x] = k
        try:
            return self.run(f, env, path)
        finally:
            if old is missing:
                del env[x]
            else:
                env[x] = old

    def bounded(self, f, env: dict, path: Path, universal: bool) -> EvalOutcome:
        n = self.term(f.bound, env)
        unknown = None
        ks = range(n)
        if not universal:
            # values outside the candidate set make the body false
            cands = _candidates(f.var, f.body, env, self)
            if cands is not None:
                ks = sorted(k for k in set(cands) if k < n) if not isinstance(cands, range) \
                    else range(min(n, cands.stop))
        for k in ks:
            r = self.with_var(f.body, f.var, k, env, path + (k,))
            if r.value is None:
                unknown = unknown or r
            elif r.value is not universal:
                return r
        if unknown is not None:
            return unknown
        return TRUE if universal else FALSE

    def memo(self, f: Formula, env: dict, path: Path) -> EvalOutcome:
        if self.witnesses:
            return self.forall(f, env, path) if isinstance(f, Forall) else self.exists(f, env, path)
        key = (id(f), path, tuple(env[v] for v in sorted(self.free(f))))
        hit = self._memo.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        r = self.forall(f, env, path) if isinstance(f, Forall) else self.exists(f, env, path)
        self._memo[key] = (f, r)
        return r

    def forall(self, f: Forall, env: dict, path: Path) -> EvalOutcome:
        if f.var not in self.free(f.body):
            return self.with_var(f.body, f.var, 0, env, path + (0,))
        for k in range(self.budget + 1):
            r = self.with_var(f.body, f.var, k, env, path + (0,))
            if r.value is False:
                return FALSE
        return Unknown(path)

    def exists(self, f: Exists, env: dict, path: Path) -> EvalOutcome:
        body_path = path + (0,)
        if path in self.witnesses:
            r = self.with_var(f.body, f.var, self.witnesses[path], env, body_path)
            return TRUE if r.value is True else Unknown(path)
        if self.use_hints and f.hint is not None:
            k = f.hint(env, self.budget)
            if k is not None:
                r = self.with_var(f.body, f.var, k, env, body_path)
                if r.value is True:
                    return TRUE
        if f.var not in self.free(f.body):
            return self.with_var(f.body, f.var, 0, env, body_path)
        cands = _candidates(f.var, f.body, env, self)
        if cands is not None:
            unknown = None
            for k in cands:
                r = self.with_var(f.body, f.var, k, env, body_path)
                if r.value is True:
                    return TRUE
                if r.value is None:
                    unknown = unknown or r
            return unknown or FALSE
        for k in range(self.budget + 1):
            r = self.with_var(f.body, f.var, k, env, body_path)
            if r.value is True:
                return TRUE
        return Unknown(path)


# ---------------------------------------------------------------------------
# Exact rules.  A positive part of the body (looking through nested
# existentials and into both sides of a disjunction) that pins ``x`` to a
# finite set makes the search exact.

_MAX_SET = 10**5


def _linear(t: Term, x: str):
    """``s`` when ``t`` is ``x + s`` or ``s + x``, ``...`` when ``t`` is ``x``
    itself, ``None`` otherwise."""
    if isinstance(t, Var) and t.name == x:
        return ...
    if isinstance(t, Add):
        if isinstance(t.left, Var) and t.left.name == x and x not in term_vars(t.right):
            return t.right
        if isinstance(t.right, Var) and t.right.name == x and x not in term_vars(t.left):
            return t.left
    return None


def _usable(t: Term, env: Mapping[str, int], blocked: frozenset[str], x: str) -> bool:
    vs = term_vars(t)
    return x not in vs and not (vs & blocked) and all(v in env for v in vs)


def _meet(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, range) and isinstance(b, range):
        return range(0, min(a.stop, b.stop))
    small, other = (a, b) if len(a) <= len(b) else (b, a)
    return [k for k in small if k in other]


def _join(a, b):
    if a is None or b is None:
        return None
    if isinstance(a, range) and isinstance(b, range):
        return range(0, max(a.stop, b.stop))
    if len(a) + len(b) > _MAX_SET:
        return None
    return sorted(set(a) | set(b))


def _cands(f: Formula, x: str, blocked: frozenset[str], env: dict, ev: "_Eval"):
    """A finite superset of the values of ``x`` making ``f`` true, or None."""
    if isinstance(f, And):
        return _meet(_cands(f.left, x, blocked, env, ev), _cands(f.right, x, blocked, env, ev))
    if isinstance(f, Or):
        return _join(_cands(f.left, x, blocked, env, ev), _cands(f.right, x, blocked, env, ev))
    if isinstance(f, Exists):
        if f.var == x:
            return None
        return _cands(f.body, x, blocked | {f.var}, env, ev)
    if isinstance(f, Eq):
        for lhs, rhs in ((f.left, f.right), (f.right, f.left)):
            s = _linear(lhs, x)
            if s is None or not _usable(rhs, env, blocked, x):
                continue
            if s is not ... and not _usable(s, env, blocked, x):
                continue
            val = ev.term(rhs, env) - (0 if s is ... else ev.term(s, env))
            return [val] if val >= 0 else []
        return None
    if isinstance(f, Lt) and isinstance(f.left, Var) and f.left.name == x:
        if _usable(f.right, env, blocked, x):
            return range(ev.term(f.right, env))
    return None


def _candidates(x: str, body: Formula, env: dict, ev: "_Eval") -> Optional[Iterable[int]]:
    return _cands(body, x, frozenset(), env, ev)


# ---------------------------------------------------------------------------
# Public API


def _check_cover(f: Formula, v: Mapping[str, int]) -> dict:
    missing = sorted(free_vars(f) - set(v))
    if missing:
        raise UncoveredVariable(f"no value for free variable(s) {', '.join(missing)}")
    env = dict(v)
    for k, x in env.items():
        if not isinstance(x, int) or x < 0:
            raise ValueError(f"{k} must be a natural, got {x!r}")
    return env


def evaluate(f: Formula, v: Mapping[str, int], budget: int = DEFAULT_BUDGET,
             use_hints: bool = True) -> EvalOutcome:
    """Truth value of ``f`` in the standard model at valuation ``v``."""
    env = _check_cover(f, v)
    return _Eval(budget, None, use_hints).run(f, env, ())


class Evaluator:
    """``evaluate`` with a fixed budget and a memo shared across calls.

    Useful when one formula is evaluated at many valuations: quantified
    subformulas met again with the same free-variable values are not
    re-searched.
    """

    def __init__(self, budget: int = DEFAULT_BUDGET, use_hints: bool = True):
        self._ev = _Eval(budget, None, use_hints)

    def __call__(self, f: Formula, v: Mapping[str, int]) -> EvalOutcome:
        return self._ev.run(f, _check_cover(f, v), ())


def eval_with_witnesses(f: Formula, v: Mapping[str, int], wm: Mapping[Path, int],
                        budget: int = 0) -> EvalOutcome:
    """Evaluate using the witnesses in ``wm`` at the addressed existentials.

    Hints are ignored; any other unbounded quantifier gets ``budget``.
    """
    env = _check_cover(f, v)
    return _Eval(budget, wm, use_hints=False).run(f, env, ())


def find_witness(f: Exists, v: Mapping[str, int], budget: int = DEFAULT_BUDGET,
                 use_hints: bool = True) -> Optional[int]:
    """A value ``k`` with ``f.body[k/f.var]`` evaluating True, if one is found."""
    env = _check_cover(f, v)
    ev = _Eval(budget, None, use_hints)

    def ok(k: int) -> bool:
        return ev.with_var(f.body, f.var, k, env, (0,)).value is True

    if use_hints and f.hint is not None:
        k = f.hint(env, budget)
        if k is not None and ok(k):
            return k
    if f.var not in free_vars(f.body):
        return 0 if ok(0) else None
    cands = _candidates(f.var, f.body, env, ev)
    for k in (cands if cands is not None else range(budget + 1)):
        if ok(k):
            return k
    return None


@dataclass
class Enumeration:
    satisfying: set[tuple[int, ...]]
    unknown: set[tuple[int, ...]]


def enumerate_satisfying(f: Formula, frees: Sequence[str], bound: int,
                         budget: int = DEFAULT_BUDGET, use_hints: bool = True,
                         fixed: Optional[Mapping[str, int]] = None) -> Enumeration:
    """Valuations of ``frees`` with components ``<= bound`` making ``f`` true.

    Tuples whose evaluation is Unknown are reported separately; ``fixed``
    supplies values for any further free variables.
    """
    from itertools import product

    out = Enumeration(set(), set())
    base = dict(fixed or {})
    for vals in product(range(bound + 1), repeat=len(frees)):
        env = {**base, **dict(zip(frees, vals))}
        r = evaluate(f, env, budget, use_hints)
        if r.value is True:
            out.satisfying.add(vals)
        elif r.value is None:
            out.unknown.add(vals)
    return out


# ---------------------------------------------------------------------------
# Witnesses from execution traces


class TraceMismatch(ValueError):
    pass


def witness_alpha(S, trace, a: Sequence[int], b: Sequence[int]) -> WitnessMap:
    """Witnesses for every existential of ``alpha(S)`` at ``(a, b)``.

    ``trace`` is the execution tree of ``run(S, a)`` (a :class:`Trace` or
    its root).  Sequences contribute their intermediate vectors; a loop
    contributes its iteration count and the code of its loop-head vectors.
    The paths follow the layout documented in :mod:`whilepa.translator`.
    """
    from . import coding
    from .interpreter import IfTrace, LoopTrace, SeqTrace, Trace
    from .syntax import Assign, If, Seq, While

    root = trace.root if isinstance(trace, Trace) else trace
    n = len(a)
    if len(b) != n:
        raise ValueError("vector length mismatch")
    wm: WitnessMap = {}

    def go(s, t, p: Path) -> None:
        if isinstance(s, Assign):
            if t is not None:
                raise TraceMismatch(f"assignment at {p} has a nested trace")
        elif isinstance(s, Seq):
            if not isinstance(t, SeqTrace) or len(t.mid) != n:
                raise TraceMismatch(f"expected a sequence trace at {p}")
            for k, z in enumerate(t.mid):
                wm[p + (0,) * k] = z
            inner = p + (0,) * n
            go(s.first, t.first, inner + (0,))
            go(s.second, t.second, inner + (1,))
        elif isinstance(s, If):
            if not isinstance(t, IfTrace):
                raise TraceMismatch(f"expected a conditional trace at {p}")
            if t.taken:
                go(s.then, t.branch, p + (0, 1))
            else:
                go(s.orelse, t.branch, p + (1, 1))
        elif isinstance(s, While):
            if not isinstance(t, LoopTrace) or len(t.heads) != len(t.bodies) + 1:
                raise TraceMismatch(f"expected a loop trace at {p}")
            wm[p + (0,)] = t.iterations
            wm[p + (0, 0)] = coding.encode_seq([coding.pack_vec(h) for h in t.heads])
            forall = p + (0, 0, 0, 1, 0)
            for k, body in enumerate(t.bodies):
                go(s.body, body, forall + (k, 1))
        else:
            raise TypeError(f"not a program: {s!r}")

    go(S, root, ())
    return wm
