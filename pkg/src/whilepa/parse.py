"""Recursive-descent parser for the concrete syntax.

Programs::

    S ::= x := E | S; S | if B then S else S fi | while B do S od | (S)
    B ::= E < E | !B | B -> B | (B)

Assertions use ``forall x. p``, ``exists x. p``, bounded ``forall x<t. p``,
``!``, ``&``, ``|``, ``->``, ``<->``, ``=``, ``<``, ``true``, ``false`` and
the extended functions ``div rem monus sqrt pair L R beta``; ``(w)_i`` is
read as ``beta(w, i)``.  A handful of Unicode spellings (``¬ ∧ ∨ → ↔ ∀ ∃ ·``)
are accepted as aliases.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    EXT_ARITY, FALSE, TRUE, Add, And, Assign, BExists, BForall, CondGoto, Eq,
    Exists, Ext, Forall, Formula, If, Iff, Imp, LAssign, LabeledProgram, Lt,
    Mul, Not, Or, Program, Seq, Term, Var, While, is_bool_expr, is_pure, num,
)

KEYWORDS = {
    "if", "then", "else", "fi", "while", "do", "od", "forall", "exists",
    "true", "false", "goto",
}

_ALIASES = {
    "¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "·": "*", "×": "*",
    "∀": "forall ", "∃": "exists ", "≔": ":=",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>\$?[A-Za-z][A-Za-z0-9_']*|\$[0-9A-Za-z_']+)
  | (?P<op><->|->|:=|[<=()!&|+*;,.{}_:])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.pos = pos
        self.line = line
        self.col = col


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'num', 'ident', 'kw', 'op', 'eof'
    text: str
    pos: int


def _normalize(text: str) -> str:
    for k, v in _ALIASES.items():
        text = text.replace(k, v)
    return text


def tokenize(text: str, allow_internal: bool = False) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        tok = m.group()
        if kind == "ident":
            if tok.startswith("$") and not allow_internal:
                raise ParseError("'$' names are reserved for generated variables", text, pos)
            if tok in KEYWORDS:
                kind = "kw"
        if kind != "ws":
            out.append(Token(kind, tok, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, allow_internal: bool = False):
        self.text = _normalize(text)
        self.toks = tokenize(self.text, allow_internal)
        self.i = 0

    # -- helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.text, self.tok.pos)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error(f"expected identifier, got {self.tok.text or 'end of input'!r}")
        name = self.tok.text
        self.i += 1
        return name

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- terms
    def term(self) -> Term:
        t = self.product()
        while self.at("+"):
            self.i += 1
            t = Add(t, self.product())
        return t

    def product(self) -> Term:
        t = self.factor()
        while self.at("*"):
            self.i += 1
            t = Mul(t, self.factor())
        return t

    def factor(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return num(int(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in EXT_ARITY and self.at("("):
                self.i += 1
                args = [self.term()]
                while self.at(","):
                    self.i += 1
                    args.append(self.term())
                self.expect(")")
                if len(args) != EXT_ARITY[tok.text]:
                    raise ParseError(
                        f"{tok.text} expects {EXT_ARITY[tok.text]} arguments",
                        self.text, tok.pos)
                return Ext(tok.text, tuple(args))
            return Var(tok.text)
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            if self.at("_"):
                self.i += 1
                return Ext("beta", (t, self.factor()))
            return t
        raise self.error(f"expected a term, got {tok.text or 'end of input'!r}")

    def _try(self, fn):
        save = self.i
        try:
            return fn()
        except ParseError:
            self.i = save
            return None

    # -- formulas
    def formula(self) -> Formula:
        if self.at("forall") or self.at("exists"):
            return self.quantified()
        left = self.implication()
        if self.at("<->"):
            self.i += 1
            return Iff(left, self.implication())
        return left

    def quantified(self) -> Formula:
        universal = self.expect(self.tok.text).text == "forall"
        var = self.ident()
        bound = None
        if self.at("<"):
            self.i += 1
            bound = self.term()
        self.expect(".")
        body = self.formula()
        if bound is None:
            return Forall(var, body) if universal else Exists(var, body)
        try:
            return BForall(var, bound, body) if universal else BExists(var, bound, body)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            if self.at("forall") or self.at("exists"):
                return Imp(left, self.quantified())
            return Imp(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("forall") or self.at("exists"):
            return self.quantified()
        return self.atom()

    def relation(self) -> Formula:
        left = self.term()
        if self.at("="):
            self.i += 1
            return Eq(left, self.term())
        if self.at("<"):
            self.i += 1
            return Lt(left, self.term())
        raise self.error("expected '=' or '<'")

    def atom(self) -> Formula:
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.at("("):
            rel = self._try(self.relation)
            if rel is not None:
                return rel
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.relation()

    # -- boolean expressions of programs
    def bexpr(self) -> Formula:
        left = self.bunary()
        if self.at("->"):
            self.i += 1
            return Imp(left, self.bexpr())
        return left

    def bunary(self) -> Formula:
        if self.at("!"):
            self.i += 1
            return Not(self.bunary())
        if self.at("("):
            rel = self._try(self.blt)
            if rel is not None:
                return rel
            self.i += 1
            b = self.bexpr()
            self.expect(")")
            return b
        return self.blt()

    def blt(self) -> Formula:
        start = self.tok.pos
        left = self.term()
        self.expect("<")
        right = self.term()
        if not (is_pure(left) and is_pure(right)):
            raise ParseError("program expressions may not use extended functions",
                             self.text, start)
        return Lt(left, right)

    # -- programs
    def program(self) -> Program:
        first = self.statement()
        if self.at(";"):
            self.i += 1
            return Seq(first, self.program())
        return first

    def statement(self) -> Program:
        tok = self.tok
        if self.at("if"):
            self.i += 1
            cond = self.bexpr()
            self.expect("then")
            then = self.program()
            self.expect("else")
            orelse = self.program()
            self.expect("fi")
            return If(cond, then, orelse)
        if self.at("while"):
            self.i += 1
            cond = self.bexpr()
            self.expect("do")
            body = self.program()
            end = self.expect("od")
            return While(cond, body, span=(tok.pos, end.pos + 2))
        if self.at("("):
            self.i += 1
            s = self.program()
            self.expect(")")
            return s
        var = self.ident()
        self.expect(":=")
        start = self.tok.pos
        expr = self.term()
        if not is_pure(expr):
            raise ParseError("program expressions may not use extended functions",
                             self.text, start)
        return Assign(var, expr)

    def labeled(self) -> LabeledProgram:
        cmds = []
        seen: set[int] = set()
        while self.tok.kind != "eof":
            if self.tok.kind != "num":
                raise self.error("expected a label")
            lab_tok = self.tok
            label = int(lab_tok.text)
            if label in seen:
                raise ParseError(f"duplicate label {label}", self.text, lab_tok.pos)
            seen.add(label)
            self.i += 1
            self.expect(":")
            if self.at("if"):
                self.i += 1
                cond = self.bexpr()
                self.expect("goto")
                if self.tok.kind != "num":
                    raise self.error("expected a target label")
                target = int(self.tok.text)
                self.i += 1
                cmds.append((label, CondGoto(cond, target)))
            else:
                var = self.ident()
                self.expect(":=")
                cmds.append((label, LAssign(var, self.term())))
            if self.at(";"):
                self.i += 1
        return LabeledProgram(tuple(cmds))


def parse_term(text: str, allow_internal: bool = False) -> Term:
    p = _Parser(text, allow_internal)
    t = p.term()
    p.done()
    return t


def parse_formula(text: str, allow_internal: bool = False) -> Formula:
    p = _Parser(text, allow_internal)
    f = p.formula()
    p.done()
    return f


def parse_bool(text: str) -> Formula:
    p = _Parser(text)
    b = p.bexpr()
    p.done()
    assert is_bool_expr(b)
    return b


def parse_program(text: str) -> Program:
    p = _Parser(text)
    s = p.program()
    p.done()
    return s


def parse_labeled(text: str) -> LabeledProgram:
    p = _Parser(text)
    return p.labeled()


def parse_triple(text: str) -> tuple[Formula, Program, Formula]:
    """``{ pre } program { post }``"""
    p = _Parser(text)
    p.expect("{")
    pre = p.formula()
    p.expect("}")
    prog = p.program()
    p.expect("{")
    post = p.formula()
    p.expect("}")
    p.done()
    return pre, prog, post


def parse_annotations(text: str) -> dict[int, Formula]:
    """Annotation file: one ``label: formula`` per line."""
    out: dict[int, Formula] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep or not head.strip().isdigit():
            raise ValueError(f"line {lineno}: expected 'label: formula'")
        label = int(head)
        if label in out:
            raise ValueError(f"line {lineno}: duplicate label {label}")
        out[label] = parse_formula(rest, allow_internal=True)
    return out
