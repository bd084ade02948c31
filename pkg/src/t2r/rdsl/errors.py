"""Reward-DSL failure taxonomy and the generation-error classifier.

Every failure maps to exactly one of five categories; the serialized report
(JSON with category/message/line/col) is the exact text the refinement loop
embeds into follow-up prompts.
"""

from __future__ import annotations

import json

from .. import schema as sch

SYNTAX = "SyntaxError"
UNKNOWN_PATH = "UnknownPath"
UNKNOWN_FUNCTION = "UnknownFunction"
TYPE_SHAPE = "TypeShapeError"
DOMAIN = "DomainError"

ERROR_CATEGORIES = (SYNTAX, UNKNOWN_PATH, UNKNOWN_FUNCTION, TYPE_SHAPE, DOMAIN)

# Generation-error buckets used in the error-distribution analysis.
MISUSE = "class-attribute-misuse"
HALLUCINATION = "attribute-hallucination"
SYNTAX_SHAPE = "syntax/shape"
WRONG_PACKAGE = "wrong-package"


class RdslError(Exception):
    """A categorized reward-program failure with source location."""

    def __init__(
        self,
        category: str,
        message: str,
        line: int = 0,
        col: int = 0,
        *,
        path: tuple[str, ...] | None = None,
        failed_name: str | None = None,
        function: str | None = None,
    ):
        assert category in ERROR_CATEGORIES, category
        self.category = category
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        self.failed_name = failed_name
        self.function = function
        super().__init__(f"{category} at {line}:{col}: {message}")

    def report(self) -> dict:
        return {"category": self.category, "message": self.message, "line": self.line, "col": self.col}

    def report_json(self) -> str:
        return json.dumps(self.report())


def syntax_error(message: str, line: int, col: int) -> RdslError:
    return RdslError(SYNTAX, message, line, col)


def classify_error(err: RdslError, schema: sch.EnvironmentSchema) -> str:
    """Map a DSL error to its generation-error bucket.

    UnknownPath splits on whether the offending terminal name exists on some
    other entity in the schema (misuse) or nowhere at all (hallucination).
    """
    if err.category == UNKNOWN_FUNCTION:
        return WRONG_PACKAGE
    if err.category in (SYNTAX, TYPE_SHAPE):
        return SYNTAX_SHAPE
    if err.category == UNKNOWN_PATH:
        name = err.failed_name or (err.path[-1] if err.path else "")
        if name and sch.attribute_owner_names(schema, name):
            return MISUSE
        return HALLUCINATION
    # DomainError is a runtime category; closest analysis bucket is shape/misc.
    return SYNTAX_SHAPE
