"""Reward DSL: parser, typechecker, and evaluator for dense-reward programs.

The surface syntax is a small Python subset matching how reward bodies are
written in practice: assignments, `+=`/`-=` accumulation, if/elif/else,
ternary conditionals, early return, and calls into a fixed builtin library
plus schema-declared entity methods. Programs are pure functions of
(state snapshot, action).
"""

from .errors import RdslError, classify_error, ERROR_CATEGORIES
from .parser import parse
from .nodes import to_source
from .typecheck import typecheck, TypedProgram
from .interp import evaluate
from .reference import reference_evaluate

__all__ = [
    "RdslError",
    "classify_error",
    "ERROR_CATEGORIES",
    "parse",
    "to_source",
    "typecheck",
    "TypedProgram",
    "evaluate",
    "reference_evaluate",
]
