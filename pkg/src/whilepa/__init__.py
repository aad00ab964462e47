"""Arithmetic, while-programs and Hoare logic over the natural numbers.

The submodules are usable on their own; the most common entry points are
re-exported here.
"""
from .coding import beta, decode_seq, encode_seq, left, pair, right, unpair
from .evaluator import EvalOutcome, enumerate_satisfying, eval_with_witnesses, evaluate
from .floyd import compile, derived_annotations, floyd_vcs
from .hoare import (
    VC, Origin, Triple, check_derivation, check_triple_on_N, derive, inv, sp,
    vc_monolithic, vc_structural,
)
from .interpreter import Done, FuelExhausted, run, run_labeled
from .parse import ParseError, parse_formula, parse_labeled, parse_program, parse_term, parse_triple
from .sigma1 import Klass, classify, eliminate_extended, to_sigma1
from .smtlib import emit_smtlib
from .syntax import pretty
from .translator import alpha, phi

__version__ = "0.1.0"
