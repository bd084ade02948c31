"""Indentation-aware tokenizer for the reward DSL."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import syntax_error

KEYWORDS = {"def", "return", "if", "elif", "else", "and", "or", "not", "True", "False"}

# Longest first so '**' wins over '*', '<=' over '<', etc.
OPERATORS = [
    "**", "->", "+=", "-=", "<=", ">=", "==", "!=",
    "+", "-", "*", "/", "(", ")", "[", "]", ",", ".", ":", "<", ">", "=",
]


@dataclass(frozen=True)
class Token:
    kind: str          # NAME KEYWORD NUMBER OP NEWLINE INDENT DEDENT EOF
    value: str
    line: int
    col: int


def _is_name_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_name_rest(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    indents = [0]
    lines = source.splitlines()
    paren_depth = 0
    continued = False  # previous line ended with a backslash

    line_no = 0
    for raw in lines:
        line_no += 1
        # strip trailing backslash continuation before measuring content
        logical = raw
        ends_continued = logical.rstrip().endswith("\\")
        if ends_continued:
            logical = logical.rstrip()[:-1]

        stripped = logical.strip()
        joining = paren_depth > 0 or continued
        if not joining:
            if not stripped or stripped.startswith("#"):
                continued = False
                continue
            indent = len(logical) - len(logical.lstrip(" "))
            if "\t" in logical[: indent + 1]:
                raise syntax_error("tabs are not allowed in indentation", line_no, 1)
            if indent > indents[-1]:
                indents.append(indent)
                tokens.append(Token("INDENT", "", line_no, 1))
            while indent < indents[-1]:
                indents.pop()
                tokens.append(Token("DEDENT", "", line_no, 1))
            if indent != indents[-1]:
                raise syntax_error("unindent does not match any outer level", line_no, 1)

        col = len(logical) - len(logical.lstrip(" ")) if not joining else 0
        i = col
        n = len(logical)
        while i < n:
            c = logical[i]
            if c in " \t":
                i += 1
                continue
            if c == "#":
                break
            col1 = i + 1
            if _is_name_start(c):
                j = i + 1
                while j < n and _is_name_rest(logical[j]):
                    j += 1
                word = logical[i:j]
                kind = "KEYWORD" if word in KEYWORDS else "NAME"
                tokens.append(Token(kind, word, line_no, col1))
                i = j
                continue
            if c.isdigit() or (c == "." and i + 1 < n and logical[i + 1].isdigit()):
                j = i
                seen_dot = False
                seen_exp = False
                while j < n:
                    ch = logical[j]
                    if ch.isdigit():
                        j += 1
                    elif ch == "." and not seen_dot and not seen_exp:
                        seen_dot = True
                        j += 1
                    elif ch in "eE" and not seen_exp and j > i:
                        seen_exp = True
                        j += 1
                        if j < n and logical[j] in "+-":
                            j += 1
                    else:
                        break
                text = logical[i:j]
                try:
                    float(text)
                except ValueError:
                    raise syntax_error(f"malformed number {text!r}", line_no, col1)
                tokens.append(Token("NUMBER", text, line_no, col1))
                i = j
                continue
            for op in OPERATORS:
                if logical.startswith(op, i):
                    if op in "([":
                        paren_depth += 1
                    elif op in ")]":
                        paren_depth -= 1
                        if paren_depth < 0:
                            raise syntax_error(f"unbalanced '{op}'", line_no, col1)
                    tokens.append(Token("OP", op, line_no, col1))
                    i += len(op)
                    break
            else:
                raise syntax_error(f"unexpected character {c!r}", line_no, col1)

        continued = ends_continued
        if paren_depth == 0 and not continued:
            if tokens and tokens[-1].kind not in ("NEWLINE", "INDENT", "DEDENT"):
                tokens.append(Token("NEWLINE", "", line_no, n + 1))

    if paren_depth > 0:
        raise syntax_error("unbalanced parenthesis at end of input", line_no or 1, 1)
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token("DEDENT", "", line_no + 1, 1))
    tokens.append(Token("EOF", "", line_no + 1, 1))
    return tokens
