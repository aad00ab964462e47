"""Abstract syntax for arithmetic terms, formulas and while-programs.

Terms range over the signature ``0, 1, +, *`` plus a layer of defined
coding functions (``div``, ``rem``, ``monus``, ``sqrt``, ``pair``, ``L``,
``R``, ``beta``).  Formulas are first-order over ``=`` and ``<`` with
ordinary and bounded quantifiers.  Boolean expressions of programs reuse the
formula nodes ``Lt``, ``Not`` and ``Imp`` restricted to pure terms, so
embedding a guard into an assertion is the identity.

All nodes are immutable and hashable.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

EXT_ARITY = {
    "div": 2,
    "rem": 2,
    "monus": 2,
    "sqrt": 1,
    "pair": 2,
    "L": 1,
    "R": 1,
    "beta": 2,
}

# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()

    def __add__(self, other: Term) -> Term:
        return Add(self, other)

    def __mul__(self, other: Term) -> Term:
        return Mul(self, other)


@dataclass(frozen=True, slots=True)
class Zero(Term):
    pass


@dataclass(frozen=True, slots=True)
class One(Term):
    pass


@dataclass(frozen=True, slots=True)
class Num(Term):
    """Numeral ``n >= 2``, shorthand for ``1 + 1 + ... + 1``."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 2:
            raise ValueError("Num is reserved for numerals >= 2; use Zero/One")


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Ext(Term):
    fn: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.fn not in EXT_ARITY:
            raise ValueError(f"unknown extended function {self.fn!r}")
        if len(self.args) != EXT_ARITY[self.fn]:
            raise ValueError(f"{self.fn} expects {EXT_ARITY[self.fn]} arguments")


ZERO = Zero()
ONE = One()


def num(n: int) -> Term:
    if n < 0:
        raise ValueError("naturals only")
    if n == 0:
        return ZERO
    if n == 1:
        return ONE
    return Num(n)


def ext(fn: str, *args: Term) -> Ext:
    return Ext(fn, tuple(args))


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Add, Mul)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Ext):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    return frozenset()


def is_pure(t: Term) -> bool:
    """True iff ``t`` contains no extended function application."""
    if isinstance(t, Ext):
        return False
    if isinstance(t, (Add, Mul)):
        return is_pure(t.left) and is_pure(t.right)
    return True


def subst_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, Add):
        return Add(subst_term(t.left, sigma), subst_term(t.right, sigma))
    if isinstance(t, Mul):
        return Mul(subst_term(t.left, sigma), subst_term(t.right, sigma))
    if isinstance(t, Ext):
        return Ext(t.fn, tuple(subst_term(a, sigma) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Lt(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    """Unbounded existential.

    ``hint`` optionally proposes a witness (see :mod:`whilepa.translator`);
    it never affects equality and the evaluator always re-checks the body.
    """

    var: str
    body: Formula
    hint: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class BForall(Formula):
    """``forall var < bound. body``"""

    var: str
    bound: Term
    body: Formula

    def __post_init__(self) -> None:
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound term mentions bound variable {self.var}")


@dataclass(frozen=True, slots=True)
class BExists(Formula):
    """``exists var < bound. body``"""

    var: str
    bound: Term
    body: Formula

    def __post_init__(self) -> None:
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound term mentions bound variable {self.var}")


TRUE: Formula = Eq(ZERO, ZERO)
FALSE: Formula = Eq(ZERO, ONE)

BINARY = (And, Or, Imp, Iff)
QUANT = (Forall, Exists)
BOUNDED = (BForall, BExists)


def conj(parts: Sequence[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``TRUE``."""
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def le(a: Term, b: Term) -> Formula:
    return Lt(a, Add(b, ONE))


def vec_eq(xs: Sequence[Term], ys: Sequence[Term]) -> Formula:
    if len(xs) != len(ys):
        raise ValueError("vector length mismatch")
    return conj([Eq(a, b) for a, b in zip(xs, ys)])


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists, BForall, BExists)):
        return (f.body,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from walk(c)


def atom_terms(f: Formula) -> Iterator[Term]:
    for g in walk(f):
        if isinstance(g, (Eq, Lt)):
            yield g.left
            yield g.right
        elif isinstance(g, BOUNDED):
            yield g.bound


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Eq, Lt)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANT):
        return free_vars(f.body) - {f.var}
    if isinstance(f, BOUNDED):
        return term_vars(f.bound) | (free_vars(f.body) - {f.var})
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    for g in walk(f):
        if isinstance(g, (QUANT + BOUNDED)):
            out.add(g.var)
    for t in atom_terms(f):
        out |= term_vars(t)
    return frozenset(out)


def has_ext(f: Formula) -> bool:
    return any(not is_pure(t) for t in atom_terms(f))


def fresh_like(name: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    base = name.lstrip("$").rstrip("0123456789'") or "v"
    k = 0
    while True:
        cand = f"${base}{k}"
        if cand not in avoid:
            return cand
        k += 1


def subst(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution ``f[sigma]``."""
    sigma = {k: v for k, v in sigma.items() if not (isinstance(v, Var) and v.name == k)}
    if not sigma:
        return f
    return _subst(f, sigma)


def _subst(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, sigma), subst_term(f.right, sigma))
    if isinstance(f, Lt):
        return Lt(subst_term(f.left, sigma), subst_term(f.right, sigma))
    if isinstance(f, Not):
        return Not(_subst(f.arg, sigma))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, sigma), _subst(f.right, sigma))
    if isinstance(f, (QUANT + BOUNDED)):
        x = f.var
        inner = {k: v for k, v in sigma.items() if k != x}
        body_free = free_vars(f.body)
        inner = {k: v for k, v in inner.items() if k in body_free}
        rename: dict[str, Term] = {}
        if any(x in term_vars(t) for t in inner.values()):
            avoid = set(body_free) | {x}
            for t in inner.values():
                avoid |= term_vars(t)
            avoid |= set(inner)
            x2 = fresh_like(x, avoid | all_vars(f.body))
            rename = {x: Var(x2)}
            x = x2
        body_sigma = {**inner, **rename}
        body = _subst(f.body, body_sigma) if body_sigma else f.body
        if isinstance(f, Exists):
            hint = f.hint
            if hint is not None and body_sigma:
                hint = hint.substitute(body_sigma)
            return Exists(x, body, hint)
        if isinstance(f, Forall):
            return Forall(x, body)
        return type(f)(x, subst_term(f.bound, sigma), body)
    raise TypeError(f"not a formula: {f!r}")


def rename_apart(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Rename bound variables so that every binder is distinct and none
    clashes with a free variable."""
    used = set(avoid) | set(free_vars(f))

    def go(g: Formula) -> Formula:
        if isinstance(g, (Eq, Lt)):
            return g
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, BINARY):
            return type(g)(go(g.left), go(g.right))
        x = g.var
        if x in used:
            x = fresh_like(x, used | all_vars(g))
        used.add(x)
        body = subst(g.body, {g.var: Var(x)}) if x != g.var else g.body
        body = go(body)
        if isinstance(g, Exists):
            return Exists(x, body, g.hint)
        if isinstance(g, Forall):
            return Forall(x, body)
        return type(g)(x, g.bound, body)

    return go(f)


def closure(f: Formula) -> tuple[Formula, tuple[str, ...]]:
    """Universal closure over the free variables in sorted order."""
    vs = tuple(sorted(free_vars(f)))
    out = f
    for v in reversed(vs):
        out = Forall(v, out)
    return out, vs


# ---------------------------------------------------------------------------
# Programs

BoolExpr = Formula  # Lt / Not / Imp over pure terms


def is_bool_expr(b: Formula) -> bool:
    if isinstance(b, Lt):
        return is_pure(b.left) and is_pure(b.right)
    if isinstance(b, Not):
        return is_bool_expr(b.arg)
    if isinstance(b, Imp):
        return is_bool_expr(b.left) and is_bool_expr(b.right)
    return False


def embed(b: BoolExpr) -> Formula:
    """Boolean expression as an assertion (identity on the shared nodes)."""
    if not is_bool_expr(b):
        raise ValueError(f"not a boolean expression: {b!r}")
    return b


class Program:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Assign(Program):
    var: str
    expr: Term

    def __post_init__(self) -> None:
        if not is_pure(self.expr):
            raise ValueError("program expressions must be pure")


@dataclass(frozen=True, slots=True)
class Seq(Program):
    first: Program
    second: Program


@dataclass(frozen=True, slots=True)
class If(Program):
    cond: Formula
    then: Program
    orelse: Program

    def __post_init__(self) -> None:
        if not is_bool_expr(self.cond):
            raise ValueError(f"not a boolean expression: {self.cond!r}")


@dataclass(frozen=True, slots=True)
class While(Program):
    cond: Formula
    body: Program
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not is_bool_expr(self.cond):
            raise ValueError(f"not a boolean expression: {self.cond!r}")


def seq(*parts: Program) -> Program:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


def program_vars(s: Program) -> set[str]:
    if isinstance(s, Assign):
        return {s.var} | set(term_vars(s.expr))
    if isinstance(s, Seq):
        return program_vars(s.first) | program_vars(s.second)
    if isinstance(s, If):
        return set(free_vars(s.cond)) | program_vars(s.then) | program_vars(s.orelse)
    if isinstance(s, While):
        return set(free_vars(s.cond)) | program_vars(s.body)
    raise TypeError(f"not a program: {s!r}")


def pvars(s: Program) -> list[str]:
    """The program-variable vector: every variable occurring in ``s``,
    sorted by name."""
    return sorted(program_vars(s))


def subprograms(s: Program) -> Iterator[Program]:
    yield s
    if isinstance(s, Seq):
        yield from subprograms(s.first)
        yield from subprograms(s.second)
    elif isinstance(s, If):
        yield from subprograms(s.then)
        yield from subprograms(s.orelse)
    elif isinstance(s, While):
        yield from subprograms(s.body)


def loops(s: Program) -> list[While]:
    return [p for p in subprograms(s) if isinstance(p, While)]


@dataclass(frozen=True, slots=True)
class LAssign:
    var: str
    expr: Term


@dataclass(frozen=True, slots=True)
class CondGoto:
    cond: Formula
    target: int


Command = Union[LAssign, CondGoto]


@dataclass(frozen=True, slots=True)
class LabeledProgram:
    commands: tuple[tuple[int, Command], ...]

    def __post_init__(self) -> None:
        labels = [lab for lab, _ in self.commands]
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be pairwise distinct")
        if any(lab < 0 for lab in labels):
            raise ValueError("labels are naturals")

    @property
    def labels(self) -> list[int]:
        return [lab for lab, _ in self.commands]

    @property
    def exit_label(self) -> int:
        """The label following the last command (``i_{n+1}``)."""
        return max(self.labels) + 1 if self.commands else 0

    @property
    def start_label(self) -> int:
        return self.commands[0][0] if self.commands else self.exit_label

    def next_label(self, index: int) -> int:
        if index + 1 < len(self.commands):
            return self.commands[index + 1][0]
        return self.exit_label

    def lab(self) -> set[int]:
        """Command labels, the exit label and every goto target."""
        out = set(self.labels) | {self.exit_label}
        out |= {c.target for _, c in self.commands if isinstance(c, CondGoto)}
        return out

    def variables(self) -> list[str]:
        vs: set[str] = set()
        for _, c in self.commands:
            if isinstance(c, LAssign):
                vs |= {c.var} | set(term_vars(c.expr))
            else:
                vs |= set(free_vars(c.cond))
        return sorted(vs)


# ---------------------------------------------------------------------------
# Pretty printing.  Output re-parses to an equal AST.

_P_QUANT, _P_IFF, _P_IMP, _P_OR, _P_AND, _P_NOT, _P_ATOM = range(7)


def _term_str(t: Term, ctx: int = 0) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Ext):
        return f"{t.fn}({', '.join(_term_str(a) for a in t.args)})"
    if isinstance(t, Add):
        s, lvl = f"{_term_str(t.left, 1)} + {_term_str(t.right, 2)}", 1
    elif isinstance(t, Mul):
        s, lvl = f"{_term_str(t.left, 2)} * {_term_str(t.right, 3)}", 2
    else:
        raise TypeError(f"not a term: {t!r}")
    return f"({s})" if lvl < ctx else s


def _formula_str(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, Eq):
        s, lvl = f"{_term_str(f.left)} = {_term_str(f.right)}", _P_ATOM
    elif isinstance(f, Lt):
        s, lvl = f"{_term_str(f.left)} < {_term_str(f.right)}", _P_ATOM
    elif isinstance(f, Not):
        s, lvl = f"!{_formula_str(f.arg, _P_NOT)}", _P_NOT
    elif isinstance(f, And):
        s, lvl = f"{_formula_str(f.left, _P_AND)} & {_formula_str(f.right, _P_NOT)}", _P_AND
    elif isinstance(f, Or):
        s, lvl = f"{_formula_str(f.left, _P_OR)} | {_formula_str(f.right, _P_AND)}", _P_OR
    elif isinstance(f, Imp):
        s, lvl = f"{_formula_str(f.left, _P_OR)} -> {_formula_str(f.right, _P_IMP)}", _P_IMP
    elif isinstance(f, Iff):
        s, lvl = f"{_formula_str(f.left, _P_IMP)} <-> {_formula_str(f.right, _P_IMP)}", _P_IFF
    elif isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        s, lvl = f"{q} {f.var}. {_formula_str(f.body)}", _P_QUANT
    elif isinstance(f, (BForall, BExists)):
        q = "forall" if isinstance(f, BForall) else "exists"
        s, lvl = f"{q} {f.var} < {_term_str(f.bound)}. {_formula_str(f.body)}", _P_QUANT
    else:
        raise TypeError(f"not a formula: {f!r}")
    # a quantifier extends to the right, so it is wrapped whenever nested
    if lvl < ctx or (lvl == _P_QUANT and ctx > 0):
        return f"({s})"
    return s


def _program_str(s: Program, ctx: int = 0) -> str:
    if isinstance(s, Assign):
        return f"{s.var} := {_term_str(s.expr)}"
    if isinstance(s, Seq):
        out = f"{_program_str(s.first, 1)}; {_program_str(s.second)}"
        return f"({out})" if ctx else out
    if isinstance(s, If):
        return (f"if {_formula_str(s.cond)} then {_program_str(s.then)} "
                f"else {_program_str(s.orelse)} fi")
    if isinstance(s, While):
        return f"while {_formula_str(s.cond)} do {_program_str(s.body)} od"
    raise TypeError(f"not a program: {s!r}")


def _labeled_str(p: LabeledProgram) -> str:
    lines = []
    for lab, c in p.commands:
        if isinstance(c, LAssign):
            lines.append(f"{lab}: {c.var} := {_term_str(c.expr)}")
        else:
            lines.append(f"{lab}: if {_formula_str(c.cond)} goto {c.target}")
    return "\n".join(lines)


def pretty(x: Term | Formula | Program | LabeledProgram) -> str:
    if isinstance(x, Term):
        return _term_str(x)
    if isinstance(x, Formula):
        return _formula_str(x)
    if isinstance(x, Program):
        return _program_str(x)
    if isinstance(x, LabeledProgram):
        return _labeled_str(x)
    raise TypeError(f"cannot pretty-print {x!r}")


def map_hints(f: Formula, fn: Callable[[Exists], Any]) -> Formula:
    """Rebuild ``f`` replacing the hint of every ``Exists`` by ``fn(node)``."""
    if isinstance(f, (Eq, Lt)):
        return f
    if isinstance(f, Not):
        return Not(map_hints(f.arg, fn))
    if isinstance(f, BINARY):
        return type(f)(map_hints(f.left, fn), map_hints(f.right, fn))
    if isinstance(f, Exists):
        return replace(f, body=map_hints(f.body, fn), hint=fn(f))
    return replace(f, body=map_hints(f.body, fn))
