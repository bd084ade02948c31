"""AST node types and the canonical source printer.

Nodes compare structurally (source locations excluded) so that
parse(to_source(parse(s))) == parse(s) holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False, kw_only=True)
    col: int = field(default=0, compare=False, kw_only=True)


# --- expressions ---

@dataclass(frozen=True)
class Num(Node):
    value: float
    text: str = field(default="", compare=False)  # original spelling, kept for printing


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class Name(Node):
    id: str


@dataclass(frozen=True)
class PathRef(Node):
    parts: tuple[str, ...]  # dotted, length >= 2 ('self' prefix preserved as written)


@dataclass(frozen=True)
class Unary(Node):
    op: str  # '-' or 'not'
    operand: "Expr"


@dataclass(frozen=True)
class Binary(Node):
    op: str  # + - * / ** < <= > >= == != and or
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Ternary(Node):
    then: "Expr"
    cond: "Expr"
    other: "Expr"


@dataclass(frozen=True)
class Call(Node):
    func: tuple[str, ...]  # ('norm',) builtin or ('robot','check_grasp') method
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Index(Node):
    target: "Expr"
    index: int


@dataclass(frozen=True)
class SliceExpr(Node):
    target: "Expr"
    start: Optional[int]
    stop: Optional[int]


Expr = Union[Num, BoolLit, Name, PathRef, Unary, Binary, Ternary, Call, Index, SliceExpr]


# --- statements ---

@dataclass(frozen=True)
class Assign(Node):
    name: str
    expr: Expr


@dataclass(frozen=True)
class AugAssign(Node):
    name: str
    op: str  # '+=' or '-='
    expr: Expr


@dataclass(frozen=True)
class If(Node):
    branches: tuple[tuple[Expr, tuple["Stmt", ...]], ...]  # (cond, body) for if/elif
    orelse: tuple["Stmt", ...]  # empty tuple when no else


@dataclass(frozen=True)
class Return(Node):
    expr: Expr


Stmt = Union[Assign, AugAssign, If, Return]


@dataclass(frozen=True)
class Program(Node):
    body: tuple[Stmt, ...]
    has_self: bool = field(default=False, compare=False)
    has_annotation: bool = field(default=False, compare=False)

    @property
    def source_hint(self) -> str:
        return "compute_dense_reward"


ENTRY_NAME = "compute_dense_reward"


# --- printer ---

_PRECEDENCE = {
    "or": 1, "and": 2,
    "<": 4, "<=": 4, ">": 4, ">=": 4, "==": 4, "!=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
    "**": 8,
}
_TERNARY_PREC = 0
_UNARY_NOT_PREC = 3
_UNARY_NEG_PREC = 7


def _num_text(n: Num) -> str:
    if n.text:
        return n.text
    v = n.value
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e16 else repr(v)


def _expr(e: Expr, parent_prec: int = -1) -> str:
    if isinstance(e, Num):
        s = _num_text(e)
    elif isinstance(e, BoolLit):
        s = "True" if e.value else "False"
    elif isinstance(e, Name):
        s = e.id
    elif isinstance(e, PathRef):
        s = ".".join(e.parts)
    elif isinstance(e, Call):
        s = ".".join(e.func) + "(" + ", ".join(_expr(a, _TERNARY_PREC) for a in e.args) + ")"
    elif isinstance(e, Index):
        s = _expr(e.target, 9) + f"[{e.index}]"
    elif isinstance(e, SliceExpr):
        lo = "" if e.start is None else str(e.start)
        hi = "" if e.stop is None else str(e.stop)
        s = _expr(e.target, 9) + f"[{lo}:{hi}]"
    elif isinstance(e, Unary):
        if e.op == "not":
            s = "not " + _expr(e.operand, _UNARY_NOT_PREC)
            return s if parent_prec <= _UNARY_NOT_PREC else f"({s})"
        s = "-" + _expr(e.operand, _UNARY_NEG_PREC)
        return s if parent_prec <= _UNARY_NEG_PREC else f"({s})"
    elif isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        # left-associative: right child needs one notch more
        s = f"{_expr(e.left, prec)} {e.op} {_expr(e.right, prec + 1)}"
        return s if parent_prec <= prec else f"({s})"
    elif isinstance(e, Ternary):
        s = (
            f"{_expr(e.then, _TERNARY_PREC + 1)} if {_expr(e.cond, _TERNARY_PREC + 1)}"
            f" else {_expr(e.other, _TERNARY_PREC)}"
        )
        return s if parent_prec <= _TERNARY_PREC else f"({s})"
    else:
        raise TypeError(f"unknown expression node {type(e).__name__}")
    return s


def _stmts(body, depth: int, out: list[str]) -> None:
    pad = "    " * depth
    for st in body:
        if isinstance(st, Assign):
            out.append(f"{pad}{st.name} = {_expr(st.expr)}")
        elif isinstance(st, AugAssign):
            out.append(f"{pad}{st.name} {st.op} {_expr(st.expr)}")
        elif isinstance(st, Return):
            out.append(f"{pad}return {_expr(st.expr)}")
        elif isinstance(st, If):
            for i, (cond, block) in enumerate(st.branches):
                out.append(f"{pad}{'if' if i == 0 else 'elif'} {_expr(cond)}:")
                _stmts(block, depth + 1, out)
            if st.orelse:
                out.append(f"{pad}else:")
                _stmts(st.orelse, depth + 1, out)
        else:
            raise TypeError(f"unknown statement node {type(st).__name__}")


def to_source(program: Program) -> str:
    """Canonical source text; parsing it back yields an equal AST."""
    receiver = "self, " if program.has_self else ""
    annot = " -> float" if program.has_annotation else ""
    lines = [f"def {ENTRY_NAME}({receiver}action){annot}:"]
    _stmts(program.body, 1, lines)
    return "\n".join(lines) + "\n"
