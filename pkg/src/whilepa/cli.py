"""Command-line driver.

Every subcommand prints plain text by default; ``--json`` prints a single
object ``{"command", "inputs", "result"}`` instead.  Exit status is 0 on
success, 64 for usage errors and unreadable or malformed input, 70 for an
internal error.  ``eval`` exits 0/1/2 for True/False/Unknown and ``check``
exits 1 when the triple fails on the samples.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path
from typing import Any, Optional, Sequence

from . import coding
from .evaluator import DEFAULT_BUDGET, evaluate
from .floyd import compile as compile_program
from .floyd import derived_annotations, floyd_vcs
from .hoare import Triple, check_triple_on_N, inv, sp, vc_monolithic, vc_structural
from .interpreter import DEFAULT_FUEL, FuelExhausted, run
from .parse import (
    ParseError, parse_annotations, parse_formula, parse_labeled, parse_program,
    parse_term, parse_triple,
)
from .sigma1 import classify, eliminate_extended, to_sigma1
from .smtlib import emit_smtlib, solve
from .syntax import While, pretty
from .translator import alpha

EX_USAGE = 64
EX_SOFTWARE = 70

# Published shape of the --json output.
JSON_SCHEMA = {
    "type": "object",
    "required": ["command", "inputs", "result"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "result": {},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None


def _valuation(text: Optional[str]) -> dict[str, int]:
    """``x=5,y=0`` as a dict."""
    out: dict[str, int] = {}
    if not text:
        return out
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name or not value.isdigit():
            raise UsageError(f"bad assignment {item!r}; expected name=natural")
        out[name] = int(value)
    return out


def _formula_arg(text: str):
    """Inline formula, or ``@path`` to read it from a file."""
    if text.startswith("@"):
        text = _read(text[1:])
    return parse_formula(text, allow_internal=True)


def _vc_rows(vcs) -> list[dict]:
    return [{"name": vc.name, "origin": vc.origin.value, "formula": pretty(vc.formula)}
            for vc in vcs]


def _vc_text(rows: list[dict]) -> str:
    return "\n".join(f"{r['name']} [{r['origin']}]: {r['formula']}" for r in rows)


def _export(args, vcs, result: dict) -> None:
    if args.smtlib:
        text = emit_smtlib(vcs)
        if args.smtlib == "-":
            result["smtlib"] = text
        else:
            Path(args.smtlib).write_text(text, encoding="utf-8")
    if args.solve:
        result["solver"] = [{"name": vc.name, "verdict": v}
                            for vc, v in zip(vcs, solve(vcs, args.timeout))]


# ---------------------------------------------------------------------------
# Subcommands.  Each returns (result, text, exit code).


def cmd_parse(args):
    src = _read(args.file)
    kind = args.kind
    fn = {"program": parse_program, "formula": lambda s: parse_formula(s, True),
          "term": lambda s: parse_term(s, True), "labeled": parse_labeled}.get(kind)
    if kind == "triple":
        t = Triple(*parse_triple(src))
        text = str(t)
    else:
        text = pretty(fn(src))
    return {"kind": kind, "pretty": text}, text, 0


def cmd_run(args):
    S = parse_program(_read(args.file))
    out = run(S, _valuation(args.input), args.fuel)
    if isinstance(out, FuelExhausted):
        return ({"status": "fuel_exhausted", "steps": out.steps},
                f"fuel exhausted after {out.steps} steps", 1)
    if args.trace:
        Path(args.trace).write_text(json.dumps(out.trace.to_json(), indent=1), encoding="utf-8")
    state = dict(sorted(out.state.items()))
    text = "\n".join(f"{k} = {v}" for k, v in state.items())
    return {"status": "done", "state": state, "steps": out.steps}, text, 0


def cmd_alpha(args):
    S = parse_program(_read(args.file))
    res = alpha(S)
    f = res.alpha
    if args.sigma1:
        f = to_sigma1(f)
    if args.pure:
        f = eliminate_extended(f)
    text = pretty(f)
    return ({"formula": text, "inputs": res.xvars, "outputs": res.yvars,
             "class": classify(f).value}, text, 0)


def cmd_sp(args):
    S = parse_program(_read(args.file))
    p = _formula_arg(args.pre)
    if args.command == "inv":
        if not isinstance(S, While):
            raise UsageError("inv needs a while loop")
        f = inv(p, S)
    else:
        f = sp(p, S)
    text = pretty(f)
    return {"formula": text}, text, 0


def cmd_vc(args):
    t = Triple(*parse_triple(_read(args.file)))
    vcs = vc_monolithic(t) if args.mode == "mono" else vc_structural(t)
    rows = _vc_rows(vcs)
    result = {"mode": args.mode, "vcs": rows}
    _export(args, vcs, result)
    text = _vc_text(rows)
    if args.solve:
        text += "\n" + "\n".join(f"{r['name']}: {r['verdict']}" for r in result["solver"])
    if args.smtlib == "-":
        text = result["smtlib"].rstrip("\n")
    return result, text, 0


def cmd_check(args):
    t = Triple(*parse_triple(_read(args.file)))
    r = check_triple_on_N(t, args.bound, args.fuel, args.budget)
    result = {
        "holds_on_samples": r.holds_on_samples,
        "vacuous": r.vacuous,
        "checked": r.checked,
        "counterexample": r.counterexample,
        "output": r.output,
        "fuel_exhausted": len(r.fuel_exhausted),
        "undetermined": len(r.undetermined),
    }
    if r.counterexample is not None:
        text = f"fails: {r.counterexample} -> {r.output}"
    elif not r.holds_on_samples:
        text = f"undetermined on {len(r.undetermined)} samples"
    else:
        text = "holds (vacuously)" if r.vacuous else f"holds on {r.checked} samples"
    if r.fuel_exhausted:
        text += f"\n{len(r.fuel_exhausted)} runs exhausted fuel"
    return result, text, 0 if r.holds_on_samples else 1


def cmd_floyd(args):
    if args.action == "compile":
        P = compile_program(parse_program(_read(args.file)))
        text = pretty(P)
        return {"listing": text}, text, 0
    if args.action == "annotate":
        P, phi = derived_annotations(parse_program(_read(args.file)))
        text = "\n".join(f"{k}: {pretty(phi[k])}" for k in sorted(phi))
        return {"listing": pretty(P), "annotations": {str(k): pretty(phi[k]) for k in sorted(phi)}}, text, 0
    P = parse_labeled(_read(args.file))
    if args.annotations is None or args.post is None:
        raise UsageError("floyd vcs needs --annotations and --post")
    phi = parse_annotations(_read(args.annotations))
    vcs = floyd_vcs(P, phi, _formula_arg(args.post))
    rows = _vc_rows(vcs)
    result = {"vcs": rows}
    _export(args, vcs, result)
    text = _vc_text(rows)
    if args.solve:
        text += "\n" + "\n".join(f"{r['name']}: {r['verdict']}" for r in result["solver"])
    if args.smtlib == "-":
        text = result["smtlib"].rstrip("\n")
    return result, text, 0


def cmd_eval(args):
    f = parse_formula(_read(args.file), allow_internal=True)
    r = evaluate(f, _valuation(args.at), args.budget)
    value = {True: "True", False: "False", None: "Unknown"}[r.value]
    code = {True: 0, False: 1, None: 2}[r.value]
    return {"value": value, "at": list(r.at) if r.at is not None else None}, str(r), code


def cmd_encode(args):
    try:
        values = [int(x) for x in args.values.split(",")] if args.values.strip() else []
    except ValueError:
        raise UsageError("values must be comma-separated naturals") from None
    if any(v < 0 for v in values):
        raise UsageError("values must be naturals")
    w = coding.encode_seq(values, args.method)
    return {"code": str(w)}, str(w), 0


def cmd_decode(args):
    if not args.code.isdigit():
        raise UsageError("code must be a natural")
    vals = coding.decode_seq(int(args.code), args.length)
    return {"values": vals}, ",".join(map(str, vals)), 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON object")

    export = argparse.ArgumentParser(add_help=False)
    export.add_argument("--smtlib", metavar="OUT", help="write SMT-LIB v2 ('-' for stdout)")
    export.add_argument("--solve", action="store_true", help="run z3 on each VC if installed")
    export.add_argument("--timeout", type=int, default=10_000, help="solver timeout in ms")

    p = _Parser(prog="whilepa", description="While-programs, arithmetic and Hoare logic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", parents=[common], help="parse and pretty-print")
    s.add_argument("file")
    s.add_argument("--kind", default="program",
                   choices=["program", "formula", "term", "triple", "labeled"])
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("run", parents=[common], help="execute a program")
    s.add_argument("file")
    s.add_argument("--input", default="", help="initial state, e.g. x=5,y=0")
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("--trace", metavar="OUT", help="write the loop trace as JSON")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("alpha", parents=[common], help="defining formula of a program")
    s.add_argument("file")
    s.add_argument("--pure", action="store_true", help="eliminate extended function symbols")
    s.add_argument("--sigma1", action="store_true", help="normalize to one existential")
    s.set_defaults(func=cmd_alpha)

    for name, what in (("sp", "strongest postcondition"), ("inv", "loop invariant")):
        s = sub.add_parser(name, parents=[common], help=what)
        s.add_argument("file")
        s.add_argument("--pre", default="true", help="precondition, or @file")
        s.set_defaults(func=cmd_sp)

    s = sub.add_parser("vc", parents=[common, export], help="verification conditions of a triple")
    s.add_argument("file")
    s.add_argument("--mode", choices=["mono", "struct"], default="struct")
    s.set_defaults(func=cmd_vc)

    s = sub.add_parser("check", parents=[common], help="test a triple on small states")
    s.add_argument("file")
    s.add_argument("--bound", type=int, default=6)
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("floyd", parents=[common, export], help="labeled programs")
    s.add_argument("action", choices=["compile", "annotate", "vcs"])
    s.add_argument("file", help="program (compile, annotate) or labeled program (vcs)")
    s.add_argument("--annotations", metavar="FILE", help="lines 'label: formula'")
    s.add_argument("--post", help="postcondition, or @file")
    s.set_defaults(func=cmd_floyd)

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula in N")
    s.add_argument("file")
    s.add_argument("--at", default="", help="valuation, e.g. x=3,y=4")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("encode", parents=[common], help="beta-code of a sequence")
    s.add_argument("values", help="comma-separated naturals")
    s.add_argument("--method", choices=["lcm", "factorial"], default="lcm")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", parents=[common], help="first n entries of a beta-code")
    s.add_argument("code")
    s.add_argument("--length", "-n", type=int, required=True)
    s.set_defaults(func=cmd_decode)
    return p


def _inputs(args) -> dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "json", "command")}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result, text, code = args.func(args)
    except (UsageError, ParseError, ValueError) as e:
        print(f"whilepa {args.command}: {e}", file=sys.stderr)
        return EX_USAGE
    except Exception:
        traceback.print_exc()
        return EX_SOFTWARE
    if args.json:
        print(json.dumps({"command": args.command, "inputs": _inputs(args), "result": result},
                         indent=2, sort_keys=True))
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
