"""Static checking of reward programs against an environment schema.

Every expression gets a dtype annotation and every name/path a resolution;
a program that typechecks can be evaluated without UnknownPath,
UnknownFunction, or TypeShapeError ever surfacing at runtime
(DomainError remains a runtime possibility).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .. import schema as sch
from ..schema import BOOLEAN, SCALAR, Dtype
from . import nodes as N
from .builtins import BUILTINS, METHOD_IMPLS, SignatureError
from .errors import RdslError, TYPE_SHAPE, UNKNOWN_FUNCTION, UNKNOWN_PATH


@dataclass(frozen=True)
class CallInfo:
    kind: str                 # 'builtin' | 'method'
    name: str                 # builtin or method name
    owner_path: str = ""      # canonical owner path for methods
    entity_args: tuple[tuple[int, str], ...] = ()  # (arg index, canonical path)


@dataclass
class TypedProgram:
    """A parsed program plus its type annotations and resolved references."""

    program: N.Program
    schema: sch.EnvironmentSchema
    source: str
    expr_types: dict[int, Dtype] = field(default_factory=dict)
    name_kinds: dict[int, tuple[str, str]] = field(default_factory=dict)  # id -> (kind, payload)
    calls: dict[int, CallInfo] = field(default_factory=dict)
    falls_through: bool = False

    def source_hash(self) -> str:
        return hashlib.sha256(self.source.encode("utf-8")).hexdigest()


def _type_err(msg: str, node: N.Node) -> RdslError:
    return RdslError(TYPE_SHAPE, msg, node.line, node.col)


def _unknown_path(exc: sch.UnknownPath, node: N.Node) -> RdslError:
    return RdslError(
        UNKNOWN_PATH, str(exc), node.line, node.col,
        path=tuple(exc.path.split(".")), failed_name=exc.failed,
    )


_VECTORISH = ("vec3", "vecn")


def _merge_vec(a: Dtype, b: Dtype) -> Dtype | None:
    """Unify two vector dtypes for elementwise arithmetic (quat excluded)."""
    if a.kind not in _VECTORISH or b.kind not in _VECTORISH:
        return None
    if a.vector_length() != b.vector_length():
        return None
    return sch.VEC3 if (a.kind == "vec3" or b.kind == "vec3") else a


class _Checker:
    def __init__(self, program: N.Program, schema: sch.EnvironmentSchema, source: str):
        self.schema = schema
        self.out = TypedProgram(program=program, schema=schema, source=source)

    # --- helpers ---

    def _set(self, node: N.Node, dt: Dtype) -> Dtype:
        self.out.expr_types[id(node)] = dt
        return dt

    def _resolve_entity_path(self, parts: tuple[str, ...], node: N.Node) -> tuple[str, sch.AttributeSpec | sch.MethodSpec]:
        try:
            spec = sch.resolve_path(self.schema, parts)
        except sch.UnknownPath as exc:
            raise _unknown_path(exc, node) from None
        canonical = ".".join(sch.split_path(parts))
        return canonical, spec

    # --- expressions ---

    def expr(self, node: N.Expr, env: dict[str, Dtype]) -> Dtype:
        if isinstance(node, N.Num):
            return self._set(node, SCALAR)
        if isinstance(node, N.BoolLit):
            return self._set(node, BOOLEAN)
        if isinstance(node, N.Name):
            return self._set(node, self._name(node, env))
        if isinstance(node, N.PathRef):
            canonical, spec = self._resolve_entity_path(node.parts, node)
            if isinstance(spec, sch.MethodSpec):
                raise _type_err(f"'{canonical}' is a method; call it with parentheses", node)
            self.out.name_kinds[id(node)] = ("path", canonical)
            return self._set(node, spec.dtype)
        if isinstance(node, N.Unary):
            return self._set(node, self._unary(node, env))
        if isinstance(node, N.Binary):
            return self._set(node, self._binary(node, env))
        if isinstance(node, N.Ternary):
            cond = self.expr(node.cond, env)
            if cond != BOOLEAN:
                raise _type_err(f"conditional-expression test must be boolean, got {cond}", node)
            a = self.expr(node.then, env)
            b = self.expr(node.other, env)
            if a != b and _merge_vec(a, b) is None:
                raise _type_err(f"conditional-expression branches differ: {a} vs {b}", node)
            return self._set(node, a if a == b else _merge_vec(a, b))
        if isinstance(node, N.Call):
            return self._set(node, self._call(node, env))
        if isinstance(node, N.Index):
            return self._set(node, self._index(node, env))
        if isinstance(node, N.SliceExpr):
            return self._set(node, self._slice(node, env))
        raise AssertionError(f"unhandled node {type(node).__name__}")

    def _name(self, node: N.Name, env: dict[str, Dtype]) -> Dtype:
        if node.id in env:
            self.out.name_kinds[id(node)] = ("local", node.id)
            return env[node.id]
        if node.id == "action":
            self.out.name_kinds[id(node)] = ("action", "")
            return sch.vecn(self.schema.action_dim)
        canonical, spec = self._resolve_entity_path((node.id,), node)
        if isinstance(spec, sch.MethodSpec):
            raise _type_err(f"'{canonical}' is a method; call it with parentheses", node)
        self.out.name_kinds[id(node)] = ("path", canonical)
        return spec.dtype

    def _unary(self, node: N.Unary, env) -> Dtype:
        dt = self.expr(node.operand, env)
        if node.op == "not":
            if dt != BOOLEAN:
                raise _type_err(f"'not' needs a boolean, got {dt}", node)
            return BOOLEAN
        if dt == SCALAR or dt.kind in _VECTORISH:
            return dt
        raise _type_err(f"unary '-' needs a scalar or vector, got {dt}", node)

    def _binary(self, node: N.Binary, env) -> Dtype:
        op = node.op
        if op in ("and", "or"):
            for side in (node.left, node.right):
                dt = self.expr(side, env)
                if dt != BOOLEAN:
                    raise _type_err(f"'{op}' needs booleans, got {dt}", node)
            return BOOLEAN
        left = self.expr(node.left, env)
        right = self.expr(node.right, env)
        if op in ("<", "<=", ">", ">="):
            if left == SCALAR and right == SCALAR:
                return BOOLEAN
            raise _type_err(f"comparison '{op}' needs scalars, got {left} and {right}", node)
        if op in ("==", "!="):
            if left == right and left in (SCALAR, BOOLEAN):
                return BOOLEAN
            raise _type_err(f"'{op}' needs two scalars or two booleans, got {left} and {right}", node)
        if op == "**":
            if left == SCALAR and right == SCALAR:
                return SCALAR
            if left.kind in _VECTORISH and right == SCALAR:
                return left
            raise _type_err(f"'**' needs scalar**scalar or vector**scalar, got {left} and {right}", node)
        # + - * /
        if left == SCALAR and right == SCALAR:
            return SCALAR
        if left.kind in _VECTORISH and right == SCALAR:
            return left
        if left == SCALAR and right.kind in _VECTORISH:
            return right
        merged = _merge_vec(left, right)
        if merged is not None:
            return merged
        raise _type_err(f"'{op}' type/shape mismatch: {left} vs {right}", node)

    def _call(self, node: N.Call, env) -> Dtype:
        if len(node.func) == 1:
            name = node.func[0]
            if name in env:
                raise _type_err(f"'{name}' is a variable, not a function", node)
            if name not in BUILTINS:
                raise RdslError(
                    UNKNOWN_FUNCTION,
                    f"unknown function '{name}'; available builtins: {', '.join(sorted(BUILTINS))}",
                    node.line, node.col, function=name,
                )
            arg_types = [self.expr(a, env) for a in node.args]
            for a, dt in zip(node.args, arg_types):
                if dt.kind == "entity":
                    raise _type_err(f"builtin '{name}' cannot take an object reference", a)
            try:
                result = BUILTINS[name].check(arg_types)
            except SignatureError as exc:
                raise _type_err(str(exc), node) from None
            self.out.calls[id(node)] = CallInfo(kind="builtin", name=name)
            return result

        # dotted call: entity method if the head resolves, else a foreign package/function
        head = sch.split_path(node.func)[0] if sch.split_path(node.func) else ""
        root = self.schema.root
        if not head or (root.attribute(head) is None and root.method(head) is None):
            dotted = ".".join(node.func)
            raise RdslError(
                UNKNOWN_FUNCTION,
                f"unknown function '{dotted}'; only schema methods and builtins"
                f" ({', '.join(sorted(BUILTINS))}) are available",
                node.line, node.col, function=dotted,
            )
        canonical, spec = self._resolve_entity_path(node.func, node)
        if not isinstance(spec, sch.MethodSpec):
            raise _type_err(f"'{canonical}' is an attribute, not a method", node)
        if spec.name not in METHOD_IMPLS:
            raise RdslError(
                UNKNOWN_FUNCTION, f"method '{spec.name}' has no runtime semantics",
                node.line, node.col, function=canonical,
            )
        if len(node.args) != len(spec.params):
            raise _type_err(
                f"'{canonical}' expects {len(spec.params)} argument(s), got {len(node.args)}", node
            )
        entity_args: list[tuple[int, str]] = []
        for i, (arg, param) in enumerate(zip(node.args, spec.params)):
            dt = self.expr(arg, env)
            if param.dtype.kind == "entity":
                if dt.kind != "entity":
                    raise _type_err(
                        f"'{canonical}' argument '{param.name}' must be an object reference, got {dt}", arg
                    )
                if param.dtype.entity and dt.entity != param.dtype.entity:
                    raise _type_err(
                        f"'{canonical}' argument '{param.name}' expects {param.dtype.entity}, got {dt.entity}", arg
                    )
                kind, payload = self.out.name_kinds[id(arg)]
                entity_args.append((i, payload))
            elif dt != param.dtype:
                raise _type_err(
                    f"'{canonical}' argument '{param.name}' expects {param.dtype}, got {dt}", arg
                )
        owner = canonical.rsplit(".", 1)[0]
        self.out.calls[id(node)] = CallInfo(
            kind="method", name=spec.name, owner_path=owner, entity_args=tuple(entity_args)
        )
        return spec.returns

    def _index(self, node: N.Index, env) -> Dtype:
        target = self.expr(node.target, env)
        length = target.vector_length()
        if length is None:
            raise _type_err(f"cannot index into {target}", node)
        if not 0 <= node.index < length:
            raise _type_err(f"index {node.index} out of range for {target}", node)
        return SCALAR

    def _slice(self, node: N.SliceExpr, env) -> Dtype:
        target = self.expr(node.target, env)
        length = target.vector_length()
        if length is None or target.kind == "quat":
            raise _type_err(f"cannot slice {target}", node)
        start = 0 if node.start is None else node.start
        stop = length if node.stop is None else node.stop
        if not (0 <= start < stop <= length):
            raise _type_err(f"slice [{start}:{stop}] out of range for {target}", node)
        return sch.vecn(stop - start)

    # --- statements ---

    def block(self, body: tuple[N.Stmt, ...], env: dict[str, Dtype]) -> tuple[dict[str, Dtype], bool]:
        terminated = False
        for st in body:
            if isinstance(st, N.Assign):
                dt = self.expr(st.expr, env)
                if dt.kind == "entity":
                    raise _type_err("cannot bind an object reference to a variable", st)
                env[st.name] = dt
            elif isinstance(st, N.AugAssign):
                if st.name not in env:
                    raise RdslError(
                        UNKNOWN_PATH,
                        f"augmented assignment to undefined variable '{st.name}'",
                        st.line, st.col, failed_name=st.name,
                    )
                current = env[st.name]
                dt = self.expr(st.expr, env)
                fake = N.Binary(op=st.op[0], left=N.Name(id=st.name), right=st.expr,
                                line=st.line, col=st.col)
                if current == SCALAR and dt == SCALAR:
                    result = SCALAR
                elif current.kind in _VECTORISH and (dt == current or dt == SCALAR or _merge_vec(current, dt)):
                    result = current
                else:
                    raise _type_err(f"'{st.op}' type/shape mismatch: {current} vs {dt}", fake)
                env[st.name] = result
            elif isinstance(st, N.Return):
                dt = self.expr(st.expr, env)
                if dt != SCALAR:
                    raise _type_err(f"reward programs must return a scalar, got {dt}", st)
                terminated = True
            elif isinstance(st, N.If):
                term = self._if(st, env)
                terminated = terminated or term
            else:
                raise AssertionError(f"unhandled statement {type(st).__name__}")
        return env, terminated

    def _if(self, st: N.If, env: dict[str, Dtype]) -> bool:
        open_paths: list[dict[str, Dtype]] = []
        all_terminated = True
        for cond, body in st.branches:
            cdt = self.expr(cond, env)
            if cdt != BOOLEAN:
                raise _type_err(f"if-condition must be boolean, got {cdt}", st)
            branch_env, term = self.block(body, dict(env))
            if not term:
                open_paths.append(branch_env)
                all_terminated = False
        if st.orelse:
            branch_env, term = self.block(st.orelse, dict(env))
            if not term:
                open_paths.append(branch_env)
                all_terminated = False
        else:
            open_paths.append(dict(env))  # implicit fall-through keeps the pre-state
            all_terminated = False

        if all_terminated:
            return True

        merged: dict[str, Dtype] = {}
        for name in set().union(*(p.keys() for p in open_paths)):
            dts = [p[name] for p in open_paths if name in p]
            if len(dts) < len(open_paths):
                continue  # not defined on every open path: unavailable afterwards
            first = dts[0]
            for other in dts[1:]:
                if other != first and _merge_vec(first, other) is None:
                    raise _type_err(
                        f"variable '{name}' has inconsistent types across branches: {first} vs {other}", st
                    )
            merged[name] = first
        env.clear()
        env.update(merged)
        return False


def typecheck(program, schema: sch.EnvironmentSchema, source: str | None = None) -> TypedProgram:
    """Typecheck a parsed program (or source text) against a schema.

    Raises RdslError with category UnknownPath, UnknownFunction, or
    TypeShapeError; messages name the offending symbol and expected vs found
    types so the refinement loop can forward them verbatim.
    """
    if isinstance(program, str):
        from .parser import parse

        source = program
        program = parse(program)
    if source is None:
        from .nodes import to_source

        source = to_source(program)
    checker = _Checker(program, schema, source)
    env, terminated = checker.block(program.body, {})
    if not terminated:
        # fall-through contract: when control can reach the end of the body,
        # the accumulated `reward` variable must exist and be scalar
        if env.get("reward") != SCALAR:
            raise RdslError(
                TYPE_SHAPE,
                "control can reach the end of compute_dense_reward without a return;"
                " accumulate into a scalar variable named 'reward' or return explicitly",
                program.line, program.col,
            )
        checker.out.falls_through = True
    return checker.out
