"""Evaluator for typechecked reward programs.

Pure: two evaluations of the same (program, snapshot, action) are
bit-identical. All math is 64-bit. Only DomainError can surface at runtime;
path/function/shape failures are ruled out by the typechecker.
"""

from __future__ import annotations

import numpy as np

from ..state import StateSnapshot
from . import nodes as N
from .builtins import BUILTINS, METHOD_IMPLS, DomainViolation
from .errors import DOMAIN, RdslError
from .typecheck import TypedProgram


class _Return(Exception):
    def __init__(self, value: float):
        self.value = value


def _domain(node: N.Node, detail: str) -> RdslError:
    return RdslError(DOMAIN, detail, node.line, node.col)


class _Interp:
    def __init__(self, typed: TypedProgram, snapshot: StateSnapshot, action: np.ndarray):
        self.typed = typed
        self.snapshot = snapshot
        self.env: dict[str, object] = {}
        self.action = action

    # --- expressions ---

    def expr(self, node: N.Expr):
        if isinstance(node, N.Num):
            return float(node.value)
        if isinstance(node, N.BoolLit):
            return node.value
        if isinstance(node, N.Name):
            kind, payload = self.typed.name_kinds[id(node)]
            if kind == "local":
                return self.env[payload]
            if kind == "action":
                return self.action
            return self._path_value(payload, node)
        if isinstance(node, N.PathRef):
            _, payload = self.typed.name_kinds[id(node)]
            return self._path_value(payload, node)
        if isinstance(node, N.Unary):
            v = self.expr(node.operand)
            return (not v) if node.op == "not" else -v
        if isinstance(node, N.Binary):
            return self._binary(node)
        if isinstance(node, N.Ternary):
            return self.expr(node.then) if self.expr(node.cond) else self.expr(node.other)
        if isinstance(node, N.Call):
            return self._call(node)
        if isinstance(node, N.Index):
            return float(self.expr(node.target)[node.index])
        if isinstance(node, N.SliceExpr):
            target = self.expr(node.target)
            return np.asarray(target[node.start:node.stop], dtype=np.float64)
        raise AssertionError(f"unhandled node {type(node).__name__}")

    def _path_value(self, canonical: str, node: N.Node):
        return self.snapshot.value(canonical)

    def _binary(self, node: N.Binary):
        op = node.op
        if op == "and":
            return bool(self.expr(node.left)) and bool(self.expr(node.right))
        if op == "or":
            return bool(self.expr(node.left)) or bool(self.expr(node.right))
        left = self.expr(node.left)
        right = self.expr(node.right)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if np.any(np.asarray(right) == 0.0):
                raise _domain(node, f"division by zero: {_short(left)} / {_short(right)}")
            return left / right
        if op == "**":
            if isinstance(left, np.ndarray):
                result = np.power(left, float(right))
            elif left < 0 and not float(right).is_integer():
                raise _domain(node, f"invalid power: {_short(left)} ** {_short(right)}")
            else:
                with np.errstate(over="ignore", invalid="ignore"):
                    result = float(np.power(float(left), float(right)))
            if np.any(~np.isfinite(np.asarray(result, dtype=np.float64))):
                raise _domain(node, f"invalid power: {_short(left)} ** {_short(right)}")
            return result
        if op in ("<", "<=", ">", ">=", "==", "!="):
            lf = float(left) if not isinstance(left, bool) else left
            rf = float(right) if not isinstance(right, bool) else right
            return {
                "<": lf < rf, "<=": lf <= rf, ">": lf > rf, ">=": lf >= rf,
                "==": lf == rf, "!=": lf != rf,
            }[op]
        raise AssertionError(op)

    def _call(self, node: N.Call):
        info = self.typed.calls[id(node)]
        if info.kind == "builtin":
            args = [self.expr(a) for a in node.args]
            try:
                return BUILTINS[info.name].impl(*args)
            except DomainViolation as exc:
                raise _domain(node, str(exc)) from None
        entity_positions = dict(info.entity_args)
        args = []
        for i, a in enumerate(node.args):
            args.append(entity_positions[i] if i in entity_positions else self.expr(a))
        try:
            return METHOD_IMPLS[info.name](self.snapshot, info.owner_path, args)
        except DomainViolation as exc:
            raise _domain(node, str(exc)) from None

    # --- statements ---

    def block(self, body) -> None:
        for st in body:
            if isinstance(st, N.Assign):
                self.env[st.name] = self.expr(st.expr)
            elif isinstance(st, N.AugAssign):
                delta = self.expr(st.expr)
                current = self.env[st.name]
                self.env[st.name] = current + delta if st.op == "+=" else current - delta
            elif isinstance(st, N.Return):
                raise _Return(float(self.expr(st.expr)))
            elif isinstance(st, N.If):
                for cond, branch in st.branches:
                    if self.expr(cond):
                        self.block(branch)
                        break
                else:
                    if st.orelse:
                        self.block(st.orelse)
            else:
                raise AssertionError(type(st).__name__)


def _short(v) -> str:
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=4, threshold=6)
    return repr(v)


def evaluate(typed: TypedProgram, snapshot: StateSnapshot, action) -> float:
    """Run the program over one (snapshot, action) pair and return the scalar
    reward. Raises RdslError(DomainError) naming the offending builtin and
    operands; raises ValueError if the action length mismatches the schema."""
    action = np.asarray(action, dtype=np.float64)
    if action.shape != (typed.schema.action_dim,):
        raise ValueError(
            f"action must have shape ({typed.schema.action_dim},), got {action.shape}"
        )
    interp = _Interp(typed, snapshot, action)
    try:
        interp.block(typed.program.body)
    except _Return as ret:
        return _finite(ret.value, typed)
    # fall-through: return the accumulated reward variable
    return _finite(float(interp.env["reward"]), typed)


def _finite(value: float, typed: TypedProgram) -> float:
    if not np.isfinite(value):
        raise RdslError(DOMAIN, f"reward evaluated to non-finite value {value!r}",
                        typed.program.line, typed.program.col)
    return value
