"""Labeled programs: compilation from while-programs and Floyd obligations."""
from __future__ import annotations

from typing import Mapping, Optional

from .hoare import VC, Origin, inv, sp
from .syntax import (
    ONE, TRUE, ZERO, And, Assign, CondGoto, Formula, If, Imp, LabeledProgram,
    LAssign, Lt, Not, Or, Program, Seq, While, subst,
)

JUMP = Lt(ZERO, ONE)


class AnnotationError(ValueError):
    pass


class _Emitter:
    def __init__(self, annotate: bool):
        self.cmds: list[list] = []
        self.annotate = annotate
        self.phi: dict[int, Formula] = {}

    def here(self) -> int:
        return len(self.cmds)

    def put(self, cmd, note: Optional[Formula]) -> int:
        lab = self.here()
        self.cmds.append([lab, cmd])
        if self.annotate:
            self.phi[lab] = note
        return lab

    def patch(self, lab: int, target: int) -> None:
        cmd = self.cmds[lab][1]
        self.cmds[lab][1] = CondGoto(cmd.cond, target)

    def emit(self, S: Program, cur: Optional[Formula]) -> Optional[Formula]:
        """Emit ``S``; ``cur`` holds on entry, the result on exit."""
        ann = self.annotate
        if isinstance(S, Assign):
            self.put(LAssign(S.var, S.expr), cur)
            return sp(cur, S) if ann else None
        if isinstance(S, Seq):
            return self.emit(S.second, self.emit(S.first, cur))
        if isinstance(S, If):
            k = self.put(CondGoto(Not(S.cond), -1), cur)
            post1 = self.emit(S.then, And(cur, S.cond) if ann else None)
            j = self.put(CondGoto(JUMP, -1), post1)
            self.patch(k, self.here())
            post2 = self.emit(S.orelse, And(cur, Not(S.cond)) if ann else None)
            self.patch(j, self.here())
            return Or(post1, post2) if ann else None
        if isinstance(S, While):
            i = inv(cur, S) if ann else None
            h = self.put(CondGoto(Not(S.cond), -1), i)
            post = self.emit(S.body, And(i, S.cond) if ann else None)
            self.put(CondGoto(JUMP, h), post)
            self.patch(h, self.here())
            return And(i, Not(S.cond)) if ann else None
        raise TypeError(f"not a program: {S!r}")

    def program(self) -> LabeledProgram:
        return LabeledProgram(tuple((lab, cmd) for lab, cmd in self.cmds))


def compile(S: Program) -> LabeledProgram:
    """Flatten ``S`` onto consecutive labels ``0, 1, ...``.

    ``if B then S1 else S2 fi`` becomes ``if !B goto else; S1; if 0<1 goto
    end; S2`` and a loop ``while B do S0 od`` becomes ``h: if !B goto end;
    S0; if 0<1 goto h``.
    """
    e = _Emitter(annotate=False)
    e.emit(S, None)
    return e.program()


def derived_annotations(S: Program, pre: Formula = TRUE) -> tuple[LabeledProgram, dict[int, Formula]]:
    """``compile(S)`` with annotations mirroring the structural Hoare proof.

    Loop heads carry ``INV``, other labels the strongest postcondition of
    the code before them, else-branches ``p & !B`` and joins the disjunction
    of both branch postconditions.
    """
    e = _Emitter(annotate=True)
    final = e.emit(S, pre)
    P = e.program()
    phi = dict(e.phi)
    phi[P.exit_label] = final
    return P, phi


def floyd_vcs(P: LabeledProgram, phi: Mapping[int, Formula], psi: Formula) -> list[VC]:
    """Obligations of a Floyd derivation of ``□(P, psi)`` under ``phi``."""
    labs = P.lab()
    if set(phi) != labs:
        missing, extra = sorted(labs - set(phi)), sorted(set(phi) - labs)
        raise AnnotationError(f"annotation domain differs from lab(P): "
                              f"missing {missing}, unexpected {extra}")
    out = [VC.close(f"start@{P.start_label}", phi[P.start_label], Origin.FloydI)]
    for m, (lab, cmd) in enumerate(P.commands):
        nxt = P.next_label(m)
        if isinstance(cmd, LAssign):
            out.append(VC.close(f"assign@{lab}",
                                Imp(phi[lab], subst(phi[nxt], {cmd.var: cmd.expr})),
                                Origin.FloydII))
        else:
            out.append(VC.close(f"jump@{lab}", Imp(And(cmd.cond, phi[lab]), phi[cmd.target]),
                                Origin.FloydIII))
            out.append(VC.close(f"fall@{lab}", Imp(And(Not(cmd.cond), phi[lab]), phi[nxt]),
                                Origin.FloydIII))
    for z in sorted(labs - set(P.labels)):
        out.append(VC.close(f"exit@{z}", Imp(phi[z], psi), Origin.FloydIV))
    return out
