"""Naive tree-walking reference interpreter used as a differential oracle.

Deliberately independent of the typechecker and the numpy evaluator: names
resolve dynamically, vectors are plain Python lists, and every builtin is
re-derived with `math`. Only the AST node definitions are shared (they are
the input format). Keep this file free of imports from typecheck/interp/
builtins so the two evaluation routes cannot share a bug.
"""

from __future__ import annotations

import math

from . import nodes as N

_STATIC_SPEED = 0.2
_ARCCOS_SLACK = 1e-9


class ReferenceDomainError(Exception):
    pass


class ReferenceFailure(Exception):
    """The reference interpreter could not evaluate (bad program); should
    never happen for typechecked programs."""


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def _as_list(value):
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def _is_vec(v) -> bool:
    return isinstance(v, list) and (not v or isinstance(v[0], float) or isinstance(v[0], int))


def _zip_op(a, b, fn):
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            raise ReferenceFailure("length mismatch")
        return [fn(x, y) for x, y in zip(a, b)]
    if isinstance(a, list):
        return [fn(x, b) for x in a]
    if isinstance(b, list):
        return [fn(a, y) for y in b]
    return fn(a, b)


def _norm(v):
    return math.sqrt(sum(float(x) * float(x) for x in v))


def _ref_builtins():
    def b_log(x):
        if x <= 0.0:
            raise ReferenceDomainError("log")
        return math.log(x)

    def b_sqrt(x):
        if x < 0.0:
            raise ReferenceDomainError("sqrt")
        return math.sqrt(x)

    def b_arccos(x):
        if x > 1.0 + _ARCCOS_SLACK or x < -1.0 - _ARCCOS_SLACK:
            raise ReferenceDomainError("arccos")
        return math.acos(min(1.0, max(-1.0, x)))

    def b_exp(x):
        try:
            return math.exp(x)
        except OverflowError:
            raise ReferenceDomainError("exp overflow") from None

    def b_minmax(fn):
        def run(*args):
            if len(args) == 1:
                return float(fn(args[0]))
            return float(fn(args[0], args[1]))
        return run

    def b_cdist_min(a, b):
        best = None
        for p in a:
            for q in b:
                d = math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(p, q)))
                if best is None or d < best:
                    best = d
        if best is None:
            raise ReferenceFailure("empty point cloud")
        return best

    def b_quat_inv(q):
        n2 = sum(float(x) * float(x) for x in q)
        if n2 == 0.0:
            raise ReferenceDomainError("quat_inv")
        return [q[0] / n2, -q[1] / n2, -q[2] / n2, -q[3] / n2]

    def b_quat_mul(a, b):
        w1, x1, y1, z1 = a
        w2, x2, y2, z2 = b
        return [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]

    def b_quat_angle(q):
        return 2.0 * math.atan2(_norm(q[1:]), abs(float(q[0])))

    def b_pose_z_axis(q):
        w, x, y, z = (float(v) for v in q)
        return [2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)]

    def b_abs(x):
        return [abs(float(v)) for v in x] if isinstance(x, list) else abs(float(x))

    def b_clip(x, lo, hi):
        def c(v):
            return min(hi, max(lo, float(v)))
        return [c(v) for v in x] if isinstance(x, list) else c(x)

    return {
        "norm": _norm,
        "dot": lambda a, b: sum(float(x) * float(y) for x, y in zip(a, b)),
        "tanh": math.tanh,
        "exp": b_exp,
        "log": b_log,
        "sqrt": b_sqrt,
        "arccos": b_arccos,
        "abs": b_abs,
        "clip": b_clip,
        "min": b_minmax(min),
        "max": b_minmax(max),
        "sum": lambda v: float(sum(float(x) for x in v)),
        "cdist_min": b_cdist_min,
        "cdist_min_point": lambda p, pc: b_cdist_min([p], pc),
        "quat_inv": b_quat_inv,
        "quat_mul": b_quat_mul,
        "quat_angle": b_quat_angle,
        "pose_z_axis": b_pose_z_axis,
        "action_norm": _norm,
        "vec3": lambda x, y, z: [float(x), float(y), float(z)],
    }


_BUILTINS = _ref_builtins()

# entity-argument positions per known method, by name
_METHOD_ENTITY_ARGS = {"check_grasp": (0,), "check_static": (), "get_world_pcd": (), "get_ee_coords": ()}


def _canonical(parts) -> str:
    parts = tuple(parts)
    if parts and parts[0] == "self":
        parts = parts[1:]
    return ".".join(parts)


class _Ref:
    def __init__(self, snapshot, action):
        self.snapshot = snapshot
        self.env: dict[str, object] = {}
        self.action = [float(a) for a in action]

    def lookup(self, dotted: str):
        value = self.snapshot.values.get(dotted)
        if value is None and dotted not in self.snapshot.values:
            raise ReferenceFailure(f"no snapshot value at '{dotted}'")
        return _as_list(value)

    def expr(self, node):
        if isinstance(node, N.Num):
            return float(node.value)
        if isinstance(node, N.BoolLit):
            return node.value
        if isinstance(node, N.Name):
            if node.id in self.env:
                return self.env[node.id]
            if node.id == "action":
                return list(self.action)
            return self.lookup(node.id)
        if isinstance(node, N.PathRef):
            return self.lookup(_canonical(node.parts))
        if isinstance(node, N.Unary):
            v = self.expr(node.operand)
            if node.op == "not":
                return not v
            return [-float(x) for x in v] if isinstance(v, list) else -v
        if isinstance(node, N.Binary):
            return self._binary(node)
        if isinstance(node, N.Ternary):
            return self.expr(node.then) if self.expr(node.cond) else self.expr(node.other)
        if isinstance(node, N.Call):
            return self._call(node)
        if isinstance(node, N.Index):
            return float(self.expr(node.target)[node.index])
        if isinstance(node, N.SliceExpr):
            return list(self.expr(node.target)[node.start:node.stop])
        raise ReferenceFailure(type(node).__name__)

    def _binary(self, node):
        op = node.op
        if op == "and":
            return bool(self.expr(node.left)) and bool(self.expr(node.right))
        if op == "or":
            return bool(self.expr(node.left)) or bool(self.expr(node.right))
        left = self.expr(node.left)
        right = self.expr(node.right)
        if op == "+":
            return _zip_op(left, right, lambda a, b: a + b)
        if op == "-":
            return _zip_op(left, right, lambda a, b: a - b)
        if op == "*":
            return _zip_op(left, right, lambda a, b: a * b)
        if op == "/":
            rs = right if isinstance(right, list) else [right]
            if any(float(r) == 0.0 for r in rs):
                raise ReferenceDomainError("division by zero")
            return _zip_op(left, right, lambda a, b: a / b)
        if op == "**":
            def p(a, b):
                if a < 0 and not float(b).is_integer():
                    raise ReferenceDomainError("pow")
                try:
                    out = float(a) ** float(b)
                except OverflowError:
                    raise ReferenceDomainError("pow overflow") from None
                if not math.isfinite(out):
                    raise ReferenceDomainError("pow overflow")
                return out
            return _zip_op(left, right, p)
        table = {
            "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
            "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
        }
        return table[op](left, right)

    def _call(self, node):
        if len(node.func) == 1:
            fn = _BUILTINS.get(node.func[0])
            if fn is None:
                raise ReferenceFailure(f"unknown builtin {node.func[0]}")
            return fn(*[self.expr(a) for a in node.args])
        name = node.func[-1]
        owner = _canonical(node.func[:-1])
        if name not in _METHOD_ENTITY_ARGS:
            raise ReferenceFailure(f"unknown method {name}")
        entity_positions = _METHOD_ENTITY_ARGS[name]
        args = []
        for i, a in enumerate(node.args):
            if i in entity_positions:
                if isinstance(a, N.Name):
                    args.append(a.id)
                elif isinstance(a, N.PathRef):
                    args.append(_canonical(a.parts))
                else:
                    raise ReferenceFailure("entity argument must be a path")
            else:
                args.append(self.expr(a))
        if name == "check_grasp":
            return self.snapshot.grasped_object is not None and self.snapshot.grasped_object == args[0]
        if name == "check_static":
            return _norm(self.lookup(f"{owner}.velocity")) <= _STATIC_SPEED
        if name == "get_world_pcd":
            pcd = self.snapshot.pointclouds.get(owner)
            if pcd is None:
                raise ReferenceDomainError("get_world_pcd")
            return [list(map(float, row)) for row in pcd]
        if name == "get_ee_coords":
            p = self.lookup(f"{owner}.ee_pose.p")
            openness = float(self.lookup(f"{owner}.gripper_openness"))
            half_gap = 0.005 + 0.02 * openness
            return [[p[0] - half_gap, p[1], p[2]], [p[0] + half_gap, p[1], p[2]]]
        raise ReferenceFailure(name)

    def block(self, body):
        for st in body:
            if isinstance(st, N.Assign):
                self.env[st.name] = self.expr(st.expr)
            elif isinstance(st, N.AugAssign):
                delta = self.expr(st.expr)
                cur = self.env[st.name]
                if st.op == "+=":
                    self.env[st.name] = _zip_op(cur, delta, lambda a, b: a + b)
                else:
                    self.env[st.name] = _zip_op(cur, delta, lambda a, b: a - b)
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
                raise ReferenceFailure(type(st).__name__)


def reference_evaluate(program: N.Program, snapshot, action) -> float:
    """Evaluate an AST directly against a snapshot; raises
    ReferenceDomainError on math-domain failures."""
    ref = _Ref(snapshot, action)
    try:
        ref.block(program.body)
    except _Return as ret:
        value = ret.value
    else:
        value = float(ref.env["reward"])
    if not math.isfinite(value):
        raise ReferenceDomainError("non-finite reward")
    return value
