"""Strongest postconditions, loop invariants and verification conditions.

Two VC generators are provided.  ``vc_monolithic`` emits the single formula
``SP(p, S) -> q``.  ``vc_structural`` follows the program: assignments give
``p -> q(E/x)``, sequences pass ``SP`` along, conditionals split on the
guard, and loops use ``INV(p, S)``.  The latter also returns the Hoare
derivation it has implicitly built, which :func:`check_derivation` replays.

Nothing here decides first-order validity.  The ``*_on_samples`` helpers
test formulas on finite sets of valuations and can only refute.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .evaluator import DEFAULT_BUDGET, Evaluator, evaluate
from .interpreter import DEFAULT_FUEL, FuelExhausted, run
from .syntax import (
    And, Assign, Exists, Formula, If, Imp, Not, Program, Seq, Var, While, all_vars,
    closure, free_vars, pretty, pvars, subst,
)
from .translator import Fresh, alpha_formula, exists_iterations


@dataclass(frozen=True)
class Triple:
    pre: Formula
    prog: Program
    post: Formula

    def variables(self) -> list[str]:
        """Program variables plus assertion parameters, sorted."""
        return sorted(set(pvars(self.prog)) | free_vars(self.pre) | free_vars(self.post))

    def __str__(self) -> str:
        return f"{{{pretty(self.pre)}}} {pretty(self.prog)} {{{pretty(self.post)}}}"


class Origin(enum.Enum):
    SPReduction = "SPReduction"
    ConseqLeft = "ConseqLeft"
    ConseqRight = "ConseqRight"
    InvInit = "InvInit"
    InvPreserve = "InvPreserve"
    InvExit = "InvExit"
    FloydI = "FloydI"
    FloydII = "FloydII"
    FloydIII = "FloydIII"
    FloydIV = "FloydIV"


@dataclass
class VC:
    name: str
    formula: Formula
    origin: Origin
    closure_vars: tuple[str, ...] = ()

    @property
    def body(self) -> Formula:
        """The formula with its universal closure stripped."""
        f = self.formula
        for _ in self.closure_vars:
            f = f.body
        return f

    @classmethod
    def close(cls, name: str, body: Formula, origin: Origin) -> "VC":
        f, vs = closure(body)
        return cls(name, f, origin, vs)


def _fresh_for(*fs: Formula, extra: Iterable[str] = ()) -> Fresh:
    avoid = set(extra)
    for f in fs:
        avoid |= all_vars(f)
    return Fresh(avoid)


def _rename(p: Formula, variables: Sequence[str], us: Sequence[str]) -> Formula:
    return subst(p, {x: Var(u) for x, u in zip(variables, us)})


def _wrap(us: Sequence[str], body: Formula) -> Formula:
    for u in reversed(us):
        body = Exists(u, body)
    return body


def sp(p: Formula, S: Program) -> Formula:
    """``exists u⃗. p(u⃗/x⃗) & alpha_S(u⃗, x⃗)`` over ``x⃗ = pvars(S)``."""
    xs = pvars(S)
    fresh = _fresh_for(p, extra=xs)
    us = [fresh("u") for _ in xs]
    a = alpha_formula(S, us, xs, variables=xs, fresh=fresh)
    return _wrap(us, And(_rename(p, xs, us), a))


def inv(p: Formula, S: While) -> Formula:
    """``exists u⃗. p(u⃗/x⃗) & exists i. alpha_S*(i, u⃗, x⃗)``."""
    if not isinstance(S, While):
        raise TypeError("INV is defined for loops")
    xs = pvars(S)
    fresh = _fresh_for(p, extra=xs)
    us = [fresh("u") for _ in xs]
    star = exists_iterations(S, us, xs, variables=xs, fresh=fresh)
    return _wrap(us, And(_rename(p, xs, us), star))


def vc_monolithic(t: Triple) -> list[VC]:
    return [VC.close("sp", Imp(sp(t.pre, t.prog), t.post), Origin.SPReduction)]


# ---------------------------------------------------------------------------
# Derivations


class Rule(enum.Enum):
    AssignAx = "AssignAx"
    Comp = "Comp"
    Cond = "Cond"
    Iter = "Iter"
    Conseq = "Conseq"
    SpecAx = "SpecAx"


ARITY = {Rule.AssignAx: 0, Rule.Comp: 2, Rule.Cond: 2, Rule.Iter: 1, Rule.Conseq: 1,
         Rule.SpecAx: 0}

Side = Union[None, Formula, "DerivationTree"]


@dataclass
class DerivationTree:
    rule: Rule
    conclusion: Union[Triple, Formula]
    premises: list["DerivationTree"] = field(default_factory=list)
    side_formulas: tuple[Side, Side] = (None, None)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


def _conseq(concl: Triple, premise: DerivationTree, left: Optional[Formula],
            right: Optional[Formula]) -> DerivationTree:
    return DerivationTree(Rule.Conseq, concl, [premise], (left, right))


def derive(t: Triple) -> tuple[DerivationTree, list[VC]]:
    """The derivation read off the completeness argument, with its VCs."""
    vcs: list[VC] = []

    def go(p: Formula, S: Program, q: Formula, path: str, in_loop: bool) -> DerivationTree:
        concl = Triple(p, S, q)
        if isinstance(S, Assign):
            qe = subst(q, {S.var: S.expr})
            side = Imp(p, qe)
            vcs.append(VC.close(f"assign{path}", side,
                                Origin.InvPreserve if in_loop else Origin.ConseqLeft))
            ax = DerivationTree(Rule.AssignAx, Triple(qe, S, q))
            return _conseq(concl, ax, side, None)
        if isinstance(S, Seq):
            r = sp(p, S.first)
            d1 = go(p, S.first, r, path + ".0", in_loop)
            d2 = go(r, S.second, q, path + ".1", in_loop)
            return DerivationTree(Rule.Comp, concl, [d1, d2])
        if isinstance(S, If):
            d1 = go(And(p, S.cond), S.then, q, path + ".t", in_loop)
            d2 = go(And(p, Not(S.cond)), S.orelse, q, path + ".e", in_loop)
            return DerivationTree(Rule.Cond, concl, [d1, d2])
        if isinstance(S, While):
            i = inv(p, S)
            init, exit_ = Imp(p, i), Imp(And(i, Not(S.cond)), q)
            vcs.append(VC.close(f"inv-init{path}", init, Origin.InvInit))
            vcs.append(VC.close(f"inv-exit{path}", exit_, Origin.InvExit))
            body = go(And(i, S.cond), S.body, i, path + ".b", True)
            it = DerivationTree(Rule.Iter, Triple(i, S, And(i, Not(S.cond))), [body])
            return _conseq(concl, it, init, exit_)
        raise TypeError(f"not a program: {S!r}")

    tree = go(t.pre, t.prog, t.post, "", False)
    return tree, vcs


def vc_structural(t: Triple) -> list[VC]:
    return derive(t)[1]


class DerivationError(ValueError):
    def __init__(self, path: tuple[int, ...], message: str):
        super().__init__(f"at {'.'.join(map(str, path)) or 'root'}: {message}")
        self.path = path


@dataclass
class CheckResult:
    ok: bool
    obligations: list[VC]
    error: Optional[str] = None
    path: Optional[tuple[int, ...]] = None


def _side(side: Side, expected: Formula, where: tuple[int, ...], what: str,
          origin: Origin, out: list[VC]) -> None:
    if isinstance(side, DerivationTree):
        if side.rule is not Rule.SpecAx or side.premises:
            raise DerivationError(where, f"{what} must be a SpecAx leaf")
        side = side.conclusion
    if side != expected:
        raise DerivationError(where, f"{what} is not {pretty(expected)}")
    out.append(VC.close(f"{origin.value}@{'.'.join(map(str, where)) or 'root'}", side, origin))


def _check(d: DerivationTree, path: tuple[int, ...], out: list[VC]) -> None:
    if not isinstance(d, DerivationTree):
        raise DerivationError(path, "not a derivation node")
    if len(d.premises) != ARITY[d.rule]:
        raise DerivationError(path, f"{d.rule.value} takes {ARITY[d.rule]} premise(s)")
    c = d.conclusion
    if not isinstance(c, Triple):
        raise DerivationError(path, f"{d.rule.value} must conclude a triple")
    prem = [p.conclusion for p in d.premises]
    if any(not isinstance(p, Triple) for p in prem):
        raise DerivationError(path, "premises must conclude triples")
    # premises first, so the deepest faulty node is the one reported
    for k, p in enumerate(d.premises):
        _check(p, path + (k,), out)
    S = c.prog
    if d.rule is Rule.AssignAx:
        if not isinstance(S, Assign):
            raise DerivationError(path, "AssignAx needs an assignment")
        if c.pre != subst(c.post, {S.var: S.expr}):
            raise DerivationError(path, "precondition is not post(E/x)")
    elif d.rule is Rule.Comp:
        a, b = prem
        if not isinstance(S, Seq) or a.prog != S.first or b.prog != S.second:
            raise DerivationError(path, "Comp premises do not match S1; S2")
        if a.pre != c.pre or b.post != c.post or a.post != b.pre:
            raise DerivationError(path, "Comp assertions do not chain")
    elif d.rule is Rule.Cond:
        a, b = prem
        if not isinstance(S, If) or a.prog != S.then or b.prog != S.orelse:
            raise DerivationError(path, "Cond premises do not match the branches")
        if a.pre != And(c.pre, S.cond) or b.pre != And(c.pre, Not(S.cond)):
            raise DerivationError(path, "Cond preconditions are not p & B, p & !B")
        if a.post != c.post or b.post != c.post:
            raise DerivationError(path, "Cond postconditions differ")
    elif d.rule is Rule.Iter:
        (a,) = prem
        if not isinstance(S, While) or a.prog != S.body:
            raise DerivationError(path, "Iter premise is not about the loop body")
        if a.pre != And(c.pre, S.cond) or a.post != c.pre:
            raise DerivationError(path, "Iter premise is not {p & B} S0 {p}")
        if c.post != And(c.pre, Not(S.cond)):
            raise DerivationError(path, "Iter conclusion post is not p & !B")
    elif d.rule is Rule.Conseq:
        (a,) = prem
        if a.prog != S:
            raise DerivationError(path, "Conseq changes the program")
        left, right = d.side_formulas
        if left is None:
            if a.pre != c.pre:
                raise DerivationError(path, "Conseq without left side formula changes pre")
        else:
            _side(left, Imp(c.pre, a.pre), path, "left side formula", Origin.ConseqLeft, out)
        if right is None:
            if a.post != c.post:
                raise DerivationError(path, "Conseq without right side formula changes post")
        else:
            _side(right, Imp(a.post, c.post), path, "right side formula", Origin.ConseqRight, out)
    else:
        raise DerivationError(path, "SpecAx only appears as a side formula")


def check_derivation(d: DerivationTree) -> CheckResult:
    """Replay every rule instance; side formulas become obligations."""
    out: list[VC] = []
    try:
        _check(d, (), out)
    except DerivationError as e:
        return CheckResult(False, out, str(e), e.path)
    return CheckResult(True, out)


# ---------------------------------------------------------------------------
# Desk-scale semantics


def box(variables: Sequence[str], bound: int) -> Iterable[dict[str, int]]:
    for vals in product(range(bound + 1), repeat=len(variables)):
        yield dict(zip(variables, vals))


@dataclass
class TripleCheck:
    holds_on_samples: bool
    counterexample: Optional[dict] = None
    output: Optional[dict] = None
    checked: int = 0
    fuel_exhausted: list = field(default_factory=list)
    undetermined: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        """Held because no sample satisfied the precondition."""
        return (self.holds_on_samples and self.checked == 0
                and not self.fuel_exhausted and not self.undetermined)


def check_triple_on_N(t: Triple, bound: int = 6, fuel: int = DEFAULT_FUEL,
                      budget: int = DEFAULT_BUDGET) -> TripleCheck:
    """Run ``S`` from every ``p``-state in the box and test ``q``.

    Fuel exhaustion counts as no output.  A ``p`` or ``q`` that evaluates
    to Unknown is listed under ``undetermined`` and makes the verdict
    ``False`` without a counterexample.
    """
    variables = t.variables()
    res = TripleCheck(True)
    for v in box(variables, bound):
        pv = evaluate(t.pre, v, budget)
        if pv.is_false:
            continue
        if pv.is_unknown:
            res.undetermined.append(v)
            continue
        out = run(t.prog, v, fuel)
        if isinstance(out, FuelExhausted):
            res.fuel_exhausted.append(v)
            continue
        res.checked += 1
        qv = evaluate(t.post, out.state, budget)
        if qv.is_false:
            return TripleCheck(False, v, out.state, res.checked, res.fuel_exhausted,
                               res.undetermined)
        if qv.is_unknown:
            res.undetermined.append(v)
    res.holds_on_samples = not res.undetermined
    return res


def sample_states(t: Triple, bound: int = 6, fuel: int = DEFAULT_FUEL,
                  budget: int = DEFAULT_BUDGET) -> list[dict[str, int]]:
    """The box, plus every state an execution from a ``p``-state in the box
    passes through (after each assignment)."""
    variables = t.variables()
    seen: dict[tuple, dict] = {}

    def add(s: dict) -> None:
        key = tuple(s.get(x, 0) for x in variables)
        seen.setdefault(key, {x: s.get(x, 0) for x in variables})

    for v in box(variables, bound):
        add(v)
    for v in box(variables, bound):
        if not evaluate(t.pre, v, budget).is_true:
            continue
        run(t.prog, v, fuel, observer=add)
    return list(seen.values())


@dataclass
class SampleVerdict:
    refuted: bool
    counterexample: Optional[dict] = None
    checked: int = 0
    unknown: int = 0

    @property
    def valid_on_samples(self) -> bool:
        return not self.refuted


def vc_on_samples(vc: VC, states: Iterable[dict[str, int]],
                  budget: int = 6) -> SampleVerdict:
    """Instantiate the closure of ``vc`` at each state; refute or not."""
    body = vc.body
    names = vc.closure_vars
    ev = Evaluator(budget)
    res = SampleVerdict(False)
    done = set()
    for s in states:
        key = tuple(s.get(x, 0) for x in names)
        if key in done:
            continue
        done.add(key)
        r = ev(body, dict(zip(names, key)))
        res.checked += 1
        if r.is_false:
            res.refuted = True
            res.counterexample = dict(zip(names, key))
            return res
        if r.is_unknown:
            res.unknown += 1
    return res


def vcs_on_samples(vcs: Sequence[VC], states: Sequence[dict[str, int]],
                   budget: int = 6) -> tuple[bool, Optional[VC], Optional[dict]]:
    """``(valid, first refuted VC, its counterexample)``."""
    for vc in vcs:
        r = vc_on_samples(vc, states, budget)
        if r.refuted:
            return False, vc, r.counterexample
    return True, None, None
