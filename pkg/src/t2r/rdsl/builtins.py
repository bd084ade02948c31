"""Builtin function library and entity-method semantics for reward programs.

Each builtin is a pure, typed function over DSL values. Type signatures are
enforced by the typechecker via `check`; runtime math lives in `impl`.
Domain violations (log of non-positive, arccos outside [-1,1] beyond slack,
division by zero) raise DomainViolation, which the evaluator converts into a
located DomainError.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from ..schema import BOOLEAN, POINTCLOUD, QUAT, SCALAR, VEC3, Dtype, vecn
from ..state import StateSnapshot

ARCCOS_SLACK = 1e-9
STATIC_SPEED_THRESHOLD = 0.2  # linear-speed bound used by check_static

__all__ = [
    "BUILTINS",
    "METHOD_IMPLS",
    "DomainViolation",
    "SignatureError",
    "ARCCOS_SLACK",
    "STATIC_SPEED_THRESHOLD",
]


class DomainViolation(Exception):
    """Math-domain failure inside a builtin; carries the offending operands."""

    def __init__(self, builtin: str, detail: str):
        self.builtin = builtin
        self.detail = detail
        super().__init__(f"{builtin}: {detail}")


class SignatureError(Exception):
    """Arity or argument-dtype mismatch for a builtin call."""

    def __init__(self, message: str):
        super().__init__(message)


def _is_vec(dt: Dtype) -> bool:
    return dt.kind in ("vec3", "quat", "vecn")


def _want(cond: bool, name: str, detail: str) -> None:
    if not cond:
        raise SignatureError(f"{name}: {detail}")


def _arity(name: str, args: list[Dtype], n: int) -> None:
    _want(len(args) == n, name, f"expected {n} argument(s), got {len(args)}")


# --- type checks ---

def _check_norm(args):
    _arity("norm", args, 1)
    _want(_is_vec(args[0]), "norm", f"expected a vector, got {args[0]}")
    return SCALAR


def _check_dot(args):
    _arity("dot", args, 2)
    a, b = args
    _want(_is_vec(a) and _is_vec(b), "dot", f"expected vectors, got {a} and {b}")
    _want(a.vector_length() == b.vector_length(), "dot",
          f"length mismatch: {a} vs {b}")
    return SCALAR


def _check_scalar_fn(name):
    def check(args):
        _arity(name, args, 1)
        _want(args[0] == SCALAR, name, f"expected scalar, got {args[0]}")
        return SCALAR
    return check


def _check_abs(args):
    _arity("abs", args, 1)
    dt = args[0]
    _want(dt == SCALAR or _is_vec(dt), "abs", f"expected scalar or vector, got {dt}")
    return dt


def _check_clip(args):
    _arity("clip", args, 3)
    x, lo, hi = args
    _want(x == SCALAR or _is_vec(x), "clip", f"expected scalar or vector, got {x}")
    _want(lo == SCALAR and hi == SCALAR, "clip",
          f"bounds must be scalars, got {lo} and {hi}")
    return x


def _check_minmax(name):
    def check(args):
        if len(args) == 1:
            _want(_is_vec(args[0]), name, f"expected a vector for 1-argument form, got {args[0]}")
            return SCALAR
        _arity(name, args, 2)
        _want(args[0] == SCALAR and args[1] == SCALAR, name,
              f"2-argument form takes scalars, got {args[0]} and {args[1]}")
        return SCALAR
    return check


def _check_sum(args):
    _arity("sum", args, 1)
    _want(_is_vec(args[0]), "sum", f"expected a vector, got {args[0]}")
    return SCALAR


def _check_cdist_min(args):
    _arity("cdist_min", args, 2)
    _want(args[0] == POINTCLOUD and args[1] == POINTCLOUD, "cdist_min",
          f"expected two point clouds, got {args[0]} and {args[1]}")
    return SCALAR


def _check_cdist_min_point(args):
    _arity("cdist_min_point", args, 2)
    _want(args[0].vector_length() == 3 and args[0].kind != "quat", "cdist_min_point",
          f"expected a 3D point first, got {args[0]}")
    _want(args[1] == POINTCLOUD, "cdist_min_point", f"expected a point cloud second, got {args[1]}")
    return SCALAR


def _check_quat1(name):
    def check(args):
        _arity(name, args, 1)
        _want(args[0] == QUAT, name, f"expected quat, got {args[0]}")
        return QUAT if name == "quat_inv" else SCALAR
    return check


def _check_quat_mul(args):
    _arity("quat_mul", args, 2)
    _want(args[0] == QUAT and args[1] == QUAT, "quat_mul",
          f"expected two quats, got {args[0]} and {args[1]}")
    return QUAT


def _check_pose_z_axis(args):
    _arity("pose_z_axis", args, 1)
    _want(args[0] == QUAT, "pose_z_axis", f"expected the pose quaternion, got {args[0]}")
    return VEC3


def _check_action_norm(args):
    _arity("action_norm", args, 1)
    _want(_is_vec(args[0]), "action_norm", f"expected the action vector, got {args[0]}")
    return SCALAR


def _check_vec3(args):
    _arity("vec3", args, 3)
    for a in args:
        _want(a == SCALAR, "vec3", f"components must be scalars, got {a}")
    return VEC3


# --- implementations (float64 throughout) ---

def _impl_log(x):
    if x <= 0.0:
        raise DomainViolation("log", f"log of non-positive operand {x!r}")
    return float(np.log(x))


def _impl_exp(x):
    out = float(np.exp(x))
    if not np.isfinite(out):
        raise DomainViolation("exp", f"overflow for operand {x!r}")
    return out


def _impl_sqrt(x):
    if x < 0.0:
        raise DomainViolation("sqrt", f"sqrt of negative operand {x!r}")
    return float(np.sqrt(x))


def _impl_arccos(x):
    if x > 1.0 + ARCCOS_SLACK or x < -1.0 - ARCCOS_SLACK:
        raise DomainViolation("arccos", f"operand {x!r} outside [-1, 1]")
    return float(np.arccos(min(1.0, max(-1.0, x))))


def _impl_quat_inv(q):
    n2 = float(np.dot(q, q))
    if n2 == 0.0:
        raise DomainViolation("quat_inv", "zero quaternion has no inverse")
    out = np.array([q[0], -q[1], -q[2], -q[3]], dtype=np.float64) / n2
    return out


def _impl_quat_mul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        dtype=np.float64,
    )


def _impl_quat_angle(q):
    # rotation angle in [0, pi]; atan2 form avoids arccos domain edges
    return float(2.0 * np.arctan2(np.linalg.norm(q[1:]), abs(float(q[0]))))


def _impl_pose_z_axis(q):
    w, x, y, z = (float(v) for v in q)
    return np.array(
        [2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)],
        dtype=np.float64,
    )


class Builtin:
    def __init__(self, name: str, check: Callable, impl: Callable):
        self.name = name
        self.check = check
        self.impl = impl


BUILTINS: dict[str, Builtin] = {
    b.name: b
    for b in [
        Builtin("norm", _check_norm, lambda v: float(np.linalg.norm(v))),
        Builtin("dot", _check_dot, lambda a, b: float(np.dot(a, b))),
        Builtin("tanh", _check_scalar_fn("tanh"), lambda x: float(np.tanh(x))),
        Builtin("exp", _check_scalar_fn("exp"), _impl_exp),
        Builtin("log", _check_scalar_fn("log"), _impl_log),
        Builtin("sqrt", _check_scalar_fn("sqrt"), _impl_sqrt),
        Builtin("arccos", _check_scalar_fn("arccos"), _impl_arccos),
        Builtin("abs", _check_abs, lambda x: float(np.abs(x)) if isinstance(x, float) else np.abs(x)),
        Builtin("clip", _check_clip,
                lambda x, lo, hi: float(np.clip(x, lo, hi)) if isinstance(x, float) else np.clip(x, lo, hi)),
        Builtin("min", _check_minmax("min"),
                lambda *a: float(np.min(a[0])) if len(a) == 1 else float(min(a[0], a[1]))),
        Builtin("max", _check_minmax("max"),
                lambda *a: float(np.max(a[0])) if len(a) == 1 else float(max(a[0], a[1]))),
        Builtin("sum", _check_sum, lambda v: float(np.sum(v))),
        Builtin("cdist_min", _check_cdist_min, lambda a, b: float(cdist(a, b).min())),
        Builtin("cdist_min_point", _check_cdist_min_point,
                lambda p, pc: float(cdist(p.reshape(1, 3), pc).min())),
        Builtin("quat_inv", _check_quat1("quat_inv"), _impl_quat_inv),
        Builtin("quat_mul", _check_quat_mul, _impl_quat_mul),
        Builtin("quat_angle", _check_quat1("quat_angle"), _impl_quat_angle),
        Builtin("pose_z_axis", _check_pose_z_axis, _impl_pose_z_axis),
        Builtin("action_norm", _check_action_norm, lambda v: float(np.linalg.norm(v))),
        Builtin("vec3", _check_vec3,
                lambda x, y, z: np.array([x, y, z], dtype=np.float64)),
    ]
}


# --- entity-method semantics ---
#
# Methods are declared per entity in the schema; their runtime meaning is a
# pure function of the snapshot. Entity-ref arguments arrive as canonical
# dotted path strings.

def _method_check_grasp(snapshot: StateSnapshot, owner: str, args: list[str]) -> bool:
    return snapshot.grasped_object is not None and snapshot.grasped_object == args[0]


def _method_check_static(snapshot: StateSnapshot, owner: str, args: list[str]) -> bool:
    vel = snapshot.value(f"{owner}.velocity")
    return bool(np.linalg.norm(vel) <= STATIC_SPEED_THRESHOLD)


def _method_get_world_pcd(snapshot: StateSnapshot, owner: str, args: list[str]) -> np.ndarray:
    try:
        return snapshot.pointclouds[owner]
    except KeyError:
        raise DomainViolation("get_world_pcd", f"no point cloud recorded for '{owner}'") from None


def _method_get_ee_coords(snapshot: StateSnapshot, owner: str, args: list[str]) -> np.ndarray:
    # two finger tips straddling the end-effector along x, spread by openness
    p = np.asarray(snapshot.value(f"{owner}.ee_pose.p"), dtype=np.float64)
    openness = float(snapshot.value(f"{owner}.gripper_openness"))
    half_gap = 0.005 + 0.02 * openness
    offset = np.array([half_gap, 0.0, 0.0])
    return np.stack([p - offset, p + offset])


METHOD_IMPLS: dict[str, Callable] = {
    "check_grasp": _method_check_grasp,
    "check_static": _method_check_static,
    "get_world_pcd": _method_get_world_pcd,
    "get_ee_coords": _method_get_ee_coords,
}
