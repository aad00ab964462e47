"""Execution of while-programs and labeled programs over the naturals.

Runs are bounded by *fuel*: every assignment and every guard evaluation
costs one unit.  Running out of fuel is reported, never raised, since it is
the only observable sign of divergence.

A successful run returns an execution tree (:class:`Trace`) that records,
for every loop executed, the vectors of program variables at the loop head
together with the nested trace of each body iteration.  Those are exactly
the data needed to build witnesses for the defining formula of a program.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from . import coding
from .syntax import (
    Add, Assign, CondGoto, Ext, Formula, If, Imp, LabeledProgram, LAssign, Lt,
    Mul, Not, Num, One, Program, Seq, Term, Var, While, Zero, is_pure, pvars,
)

DEFAULT_FUEL = 10**6

State = dict[str, int]

_EXT = {
    "div": coding.div,
    "rem": coding.rem,
    "monus": coding.monus,
    "sqrt": coding.isqrt,
    "pair": coding.pair,
    "L": coding.left,
    "R": coding.right,
    "beta": coding.beta,
}


class UnboundVariable(KeyError):
    pass


def eval_term(t: Term, v: Mapping[str, int], default: Optional[int] = None) -> int:
    """Value of ``t`` (extended functions allowed) under ``v``.

    With ``default=None`` an unmapped variable raises ``UnboundVariable``.
    """
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            if default is None:
                raise UnboundVariable(t.name) from None
            return default
    if isinstance(t, Add):
        return eval_term(t.left, v, default) + eval_term(t.right, v, default)
    if isinstance(t, Mul):
        return eval_term(t.left, v, default) * eval_term(t.right, v, default)
    if isinstance(t, Zero):
        return 0
    if isinstance(t, One):
        return 1
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Ext):
        return _EXT[t.fn](*(eval_term(a, v, default) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def eval_term_pure(t: Term, s: Mapping[str, int]) -> int:
    if not is_pure(t):
        raise ValueError("program expressions are pure")
    return eval_term(t, s, default=0)


def eval_bool(b: Formula, s: Mapping[str, int]) -> bool:
    if isinstance(b, Lt):
        return eval_term_pure(b.left, s) < eval_term_pure(b.right, s)
    if isinstance(b, Not):
        return not eval_bool(b.arg, s)
    if isinstance(b, Imp):
        return (not eval_bool(b.left, s)) or eval_bool(b.right, s)
    raise ValueError(f"not a boolean expression: {b!r}")


# ---------------------------------------------------------------------------
# Execution trees


@dataclass
class SeqTrace:
    first: "ExecTrace"
    second: "ExecTrace"
    mid: tuple[int, ...]


@dataclass
class IfTrace:
    taken: bool
    branch: "ExecTrace"


@dataclass
class LoopTrace:
    node: While
    heads: list[tuple[int, ...]] = field(default_factory=list)
    bodies: list["ExecTrace"] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.bodies)


ExecTrace = Union[None, SeqTrace, IfTrace, LoopTrace]


@dataclass
class Trace:
    program: Program
    variables: list[str]
    root: ExecTrace

    def loops(self) -> list[LoopTrace]:
        """Every executed loop, in execution order (outer before inner)."""
        out: list[LoopTrace] = []

        def go(t: ExecTrace) -> None:
            if isinstance(t, SeqTrace):
                go(t.first)
                go(t.second)
            elif isinstance(t, IfTrace):
                go(t.branch)
            elif isinstance(t, LoopTrace):
                out.append(t)
                for b in t.bodies:
                    go(b)

        go(self.root)
        return out

    def to_json(self) -> dict:
        loops = []
        for lt in self.loops():
            at = list(lt.node.span) if lt.node.span is not None else None
            loops.append({"at": at, "vectors": [list(h) for h in lt.heads]})
        return {"variables": self.variables, "loops": loops}


@dataclass
class Done:
    state: State
    trace: Optional[Trace] = None
    steps: int = 0


@dataclass
class FuelExhausted:
    steps: int


RunOutcome = Union[Done, FuelExhausted]


class _OutOfFuel(Exception):
    pass


class _Machine:
    def __init__(self, variables: Sequence[str], fuel: int,
                 observer: Optional[Callable[[State], None]] = None):
        if fuel <= 0:
            raise ValueError("fuel must be positive")
        self.variables = list(variables)
        self.fuel = fuel
        self.steps = 0
        self.observer = observer

    def tick(self) -> None:
        if self.steps >= self.fuel:
            raise _OutOfFuel
        self.steps += 1

    def vec(self, s: State) -> tuple[int, ...]:
        return tuple(s.get(x, 0) for x in self.variables)

    def guard(self, b: Formula, s: State) -> bool:
        self.tick()
        return eval_bool(b, s)

    def exec(self, p: Program, s: State) -> ExecTrace:
        if isinstance(p, Assign):
            self.tick()
            s[p.var] = eval_term_pure(p.expr, s)
            if self.observer is not None:
                self.observer(dict(s))
            return None
        if isinstance(p, Seq):
            t1 = self.exec(p.first, s)
            mid = self.vec(s)
            t2 = self.exec(p.second, s)
            return SeqTrace(t1, t2, mid)
        if isinstance(p, If):
            taken = self.guard(p.cond, s)
            return IfTrace(taken, self.exec(p.then if taken else p.orelse, s))
        if isinstance(p, While):
            lt = LoopTrace(p, [self.vec(s)])
            while self.guard(p.cond, s):
                lt.bodies.append(self.exec(p.body, s))
                lt.heads.append(self.vec(s))
            return lt
        raise TypeError(f"not a program: {p!r}")


def run(S: Program, s: Mapping[str, int], fuel: int = DEFAULT_FUEL,
        variables: Optional[Sequence[str]] = None,
        observer: Optional[Callable[[State], None]] = None) -> RunOutcome:
    """Execute ``S`` from state ``s``.

    ``variables`` fixes the vector layout used in the trace; it defaults to
    ``pvars(S)`` and must contain it.  Variables outside that vector are
    carried through unchanged.
    """
    variables = pvars(S) if variables is None else list(variables)
    m = _Machine(variables, fuel, observer)
    state = dict(s)
    for x in variables:
        state.setdefault(x, 0)
    try:
        root = m.exec(S, state)
    except _OutOfFuel:
        return FuelExhausted(m.steps)
    return Done(state, Trace(S, variables, root), m.steps)


def run_vector(S: Program, a: Sequence[int], variables: Sequence[str],
               fuel: int = DEFAULT_FUEL) -> Optional[tuple[int, ...]]:
    """Final vector of ``S`` from vector ``a``, or ``None`` if fuel runs out."""
    out = run(S, dict(zip(variables, a)), fuel, variables)
    if isinstance(out, FuelExhausted):
        return None
    return tuple(out.state[x] for x in variables)


def loop_heads(S: While, a: Sequence[int], variables: Sequence[str],
               fuel: int = DEFAULT_FUEL, limit: Optional[int] = None,
               stop_at: Optional[tuple[int, ...]] = None) -> tuple[list[tuple[int, ...]], bool]:
    """Loop-head vectors of ``S`` from ``a``.

    Returns ``(heads, exited)``; ``exited`` is true when the guard was found
    false at the last head.  Collection stops early after ``limit`` heads or
    on reaching ``stop_at``.
    """
    m = _Machine(variables, fuel)
    s = dict(zip(variables, a))
    heads = [tuple(a)]
    try:
        while True:
            if stop_at is not None and heads[-1] == stop_at:
                return heads, not m.guard(S.cond, s)
            if limit is not None and len(heads) >= limit:
                return heads, False
            if not m.guard(S.cond, s):
                return heads, True
            m.exec(S.body, s)
            heads.append(m.vec(s))
    except _OutOfFuel:
        return heads, False


def iterate(S: Program, a: Sequence[int], k: int, variables: Sequence[str],
            fuel: int = DEFAULT_FUEL) -> Optional[list[tuple[int, ...]]]:
    """``[a, S(a), S(S(a)), ...]`` of length ``k + 1``, ignoring any guard."""
    m = _Machine(variables, fuel)
    s = dict(zip(variables, a))
    out = [tuple(a)]
    try:
        for _ in range(k):
            m.exec(S, s)
            out.append(m.vec(s))
    except _OutOfFuel:
        return None
    return out


def run_labeled(P: LabeledProgram, s: Mapping[str, int], fuel: int = DEFAULT_FUEL,
                record: bool = False) -> RunOutcome:
    """Small-step execution; halts once control leaves the command labels.

    With ``record`` the trace is the list of visited labels (stored in
    ``Done.trace``).
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    index = {lab: k for k, (lab, _) in enumerate(P.commands)}
    state = dict(s)
    for x in P.variables():
        state.setdefault(x, 0)
    pc = P.start_label
    steps = 0
    visited: list[int] = []
    while pc in index:
        if steps >= fuel:
            return FuelExhausted(steps)
        steps += 1
        if record:
            visited.append(pc)
        k = index[pc]
        cmd = P.commands[k][1]
        if isinstance(cmd, LAssign):
            state[cmd.var] = eval_term_pure(cmd.expr, state)
            pc = P.next_label(k)
        elif isinstance(cmd, CondGoto):
            pc = cmd.target if eval_bool(cmd.cond, state) else P.next_label(k)
        else:
            raise TypeError(f"unknown command {cmd!r}")
    if record:
        visited.append(pc)
    return Done(state, visited if record else None, steps)
