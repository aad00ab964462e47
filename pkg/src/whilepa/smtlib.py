"""SMT-LIB v2 export of verification conditions.

Naturals become ``Int`` with an explicit ``>= 0`` guard at every binder.
The extended functions get total definitions that agree with the
library's conventions at zero (``div(x, 0) = 0``, ``rem(x, 0) = x``)
instead of the solver's own partial ``div``/``mod``.  Each VC is checked
in its own ``push``/``pop`` scope by asserting its negation, so ``unsat``
means the VC is valid.
"""
from __future__ import annotations

import re
from typing import Iterable, Sequence

from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Ext, Forall, Formula, Iff, Imp, Lt,
    Mul, Not, Num, One, Or, Term, Var, Zero, atom_terms, free_vars,
)

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$")
_RESERVED = {
    "div", "mod", "abs", "and", "or", "not", "ite", "let", "forall", "exists",
    "true", "false", "distinct", "par", "as", "assert", "push", "pop",
}

# name -> (dependencies, definition lines)
_DEFS: dict[str, tuple[tuple[str, ...], str]] = {
    "nat_div": ((), "(define-fun nat_div ((x Int) (y Int)) Int (ite (= y 0) 0 (div x y)))"),
    "nat_rem": ((), "(define-fun nat_rem ((x Int) (y Int)) Int (ite (= y 0) x (mod x y)))"),
    "nat_monus": ((), "(define-fun nat_monus ((x Int) (y Int)) Int (ite (<= y x) (- x y) 0))"),
    "nat_sqrt": ((), "(declare-fun nat_sqrt (Int) Int)\n"
                     "(assert (forall ((x Int)) (=> (>= x 0) (and (>= (nat_sqrt x) 0) "
                     "(<= (* (nat_sqrt x) (nat_sqrt x)) x) "
                     "(< x (* (+ (nat_sqrt x) 1) (+ (nat_sqrt x) 1)))))))"),
    "nat_pair": ((), "(define-fun nat_pair ((x Int) (y Int)) Int "
                     "(+ (div (* (+ x y 1) (+ x y)) 2) y))"),
    "nat_diag": (("nat_sqrt",), "(define-fun nat_diag ((z Int)) Int "
                                "(- (div (+ (nat_sqrt (+ (* 8 z) 1)) 1) 2) 1))"),
    "nat_R": (("nat_diag",), "(define-fun nat_R ((z Int)) Int "
                             "(- z (div (* (nat_diag z) (+ (nat_diag z) 1)) 2)))"),
    "nat_L": (("nat_diag", "nat_R"), "(define-fun nat_L ((z Int)) Int (- (nat_diag z) (nat_R z)))"),
    "nat_beta": (("nat_rem", "nat_L", "nat_R"),
                 "(define-fun nat_beta ((w Int) (i Int)) Int "
                 "(nat_rem (nat_L w) (+ (* (nat_R w) (+ i 1)) 1)))"),
}

_FN = {"div": "nat_div", "rem": "nat_rem", "monus": "nat_monus", "sqrt": "nat_sqrt",
       "pair": "nat_pair", "L": "nat_L", "R": "nat_R", "beta": "nat_beta"}


class OpenFormula(ValueError):
    pass


def symbol(name: str) -> str:
    if _SIMPLE.match(name) and name not in _RESERVED and not name.startswith("nat_"):
        return name
    return "|v." + name.replace("|", "_").replace("\\", "_") + "|"


def term_to_smt(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return symbol(t.name)
    if isinstance(t, Add):
        return f"(+ {term_to_smt(t.left)} {term_to_smt(t.right)})"
    if isinstance(t, Mul):
        return f"(* {term_to_smt(t.left)} {term_to_smt(t.right)})"
    if isinstance(t, Ext):
        return f"({_FN[t.fn]} {' '.join(term_to_smt(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def to_smt(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"(= {term_to_smt(f.left)} {term_to_smt(f.right)})"
    if isinstance(f, Lt):
        return f"(< {term_to_smt(f.left)} {term_to_smt(f.right)})"
    if isinstance(f, Not):
        return f"(not {to_smt(f.arg)})"
    if isinstance(f, And):
        return f"(and {to_smt(f.left)} {to_smt(f.right)})"
    if isinstance(f, Or):
        return f"(or {to_smt(f.left)} {to_smt(f.right)})"
    if isinstance(f, Imp):
        return f"(=> {to_smt(f.left)} {to_smt(f.right)})"
    if isinstance(f, Iff):
        return f"(= {to_smt(f.left)} {to_smt(f.right)})"
    x = symbol(f.var) if isinstance(f, (Forall, Exists, BForall, BExists)) else None
    if isinstance(f, Forall):
        return f"(forall (({x} Int)) (=> (>= {x} 0) {to_smt(f.body)}))"
    if isinstance(f, Exists):
        return f"(exists (({x} Int)) (and (>= {x} 0) {to_smt(f.body)}))"
    if isinstance(f, BForall):
        return (f"(forall (({x} Int)) (=> (and (>= {x} 0) (< {x} {term_to_smt(f.bound)})) "
                f"{to_smt(f.body)}))")
    if isinstance(f, BExists):
        return (f"(exists (({x} Int)) (and (>= {x} 0) (< {x} {term_to_smt(f.bound)}) "
                f"{to_smt(f.body)}))")
    raise TypeError(f"not a formula: {f!r}")


def _used(fs: Iterable[Formula]) -> list[str]:
    need: set[str] = set()

    def visit(t: Term) -> None:
        if isinstance(t, Ext):
            need.add(_FN[t.fn])
            for a in t.args:
                visit(a)
        elif isinstance(t, (Add, Mul)):
            visit(t.left)
            visit(t.right)

    for f in fs:
        for t in atom_terms(f):
            visit(t)
    order: list[str] = []

    def add(n: str) -> None:
        if n in order:
            return
        for d in _DEFS[n][0]:
            add(d)
        order.append(n)

    for n in _DEFS:
        if n in need:
            add(n)
    return order


def emit_smtlib(vcs: Sequence, logic: str = "AUFNIA") -> str:
    """One script checking every VC; ``vcs`` holds VC objects or closed formulas."""
    items = []
    for k, vc in enumerate(vcs):
        f = getattr(vc, "formula", vc)
        name = getattr(vc, "name", f"vc{k}")
        origin = getattr(getattr(vc, "origin", None), "value", "")
        open_vars = free_vars(f)
        if open_vars:
            raise OpenFormula(f"VC {name} has free variables {sorted(open_vars)}")
        items.append((name, origin, f))
    lines = [f"(set-logic {logic})", "(set-option :produce-models true)"]
    for n in _used(f for _, _, f in items):
        lines.append(_DEFS[n][1])
    for name, origin, f in items:
        label = name.replace("\n", " ")
        lines.append(f"; {label}" + (f" [{origin}]" if origin else ""))
        lines.append("(push 1)")
        lines.append(f"(assert (not {to_smt(f)}))")
        lines.append("(check-sat)")
        lines.append("(pop 1)")
    return "\n".join(lines) + "\n"


def sexprs(text: str) -> list:
    """Minimal S-expression reader used to check well-formedness.

    Raises ``ValueError`` on unbalanced parentheses or a stray token.
    """
    tokens = re.findall(r'\(|\)|\|[^|]*\||"(?:[^"]|"")*"|;[^\n]*|[^\s()|";]+', text)
    stack: list[list] = [[]]
    for tok in tokens:
        if tok.startswith(";"):
            continue
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    top = stack[0]
    if any(not isinstance(x, list) for x in top):
        raise ValueError("atom at top level")
    return top


def solve(vcs: Sequence, timeout_ms: int = 10_000) -> list[str]:
    """z3's verdict on the negation of each VC: ``unsat`` (valid), ``sat``
    (invalid) or ``unknown``, verbatim.  Needs the optional ``z3-solver``."""
    try:
        import z3
    except ImportError:
        raise RuntimeError("z3-solver is not installed") from None
    out = []
    for vc in vcs:
        script = [ln for ln in emit_smtlib([vc]).splitlines()
                  if ln not in ("(push 1)", "(pop 1)", "(check-sat)")
                  and not ln.startswith("(set-option")]
        s = z3.Solver()
        s.set("timeout", timeout_ms)
        s.from_string("\n".join(script))
        out.append(str(s.check()))
    return out
