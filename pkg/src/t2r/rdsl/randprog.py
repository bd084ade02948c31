"""Seeded generators for random valid snapshots and random well-typed
reward programs, used by the differential and soundness suites."""

from __future__ import annotations

import numpy as np

from .. import schema as sch
from ..state import StateSnapshot


def iter_entity_paths(schema: sch.EnvironmentSchema):
    """(dotted prefix, EntitySpec) for each reachable entity instance; the
    root has prefix ''."""

    def walk(ent, prefix, seen):
        yield ".".join(prefix), ent
        for attr in ent.attributes:
            if attr.dtype.kind == "entity":
                target = schema.entity(attr.dtype.entity)
                if target is not None and target.name not in seen:
                    yield from walk(target, prefix + (attr.name,), seen + (target.name,))

    yield from walk(schema.root, (), (schema.root.name,))


def _random_unit_quat(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    n = np.linalg.norm(q)
    if n < 1e-9:
        return np.array([1.0, 0.0, 0.0, 0.0])
    return q / n


def random_snapshot(
    schema: sch.EnvironmentSchema,
    rng: np.random.Generator,
    pcd_points: int = 6,
    step: int = 0,
) -> StateSnapshot:
    """A snapshot with schema-conforming random values: bounded scalars and
    vectors, unit quaternions, const attributes pinned, point clouds for every
    entity exposing get_world_pcd, and a randomly chosen grasped object."""
    values: dict[str, object] = {}
    for path, attr in sch.iter_leaf_paths(schema):
        dt = attr.dtype
        if attr.const is not None:
            values[path] = float(attr.const)
        elif dt.kind == "scalar":
            values[path] = float(rng.uniform(-2.0, 2.0))
        elif dt.kind == "boolean":
            values[path] = bool(rng.integers(0, 2))
        elif dt.kind == "quat":
            values[path] = _random_unit_quat(rng)
        elif dt.kind == "pointcloud":
            values[path] = rng.uniform(-1.0, 1.0, size=(pcd_points, 3))
        else:
            values[path] = rng.uniform(-2.0, 2.0, size=dt.vector_length())

    pointclouds: dict[str, np.ndarray] = {}
    grasp_candidates: list[str] = []
    for prefix, ent in iter_entity_paths(schema):
        if ent.method("get_world_pcd") is not None and prefix:
            pointclouds[prefix] = rng.uniform(-1.0, 1.0, size=(pcd_points, 3))
        if prefix and ent.method("check_grasp") is None:
            grasp_candidates.append(prefix)
    grasped = None
    if grasp_candidates and rng.uniform() < 0.5:
        grasped = grasp_candidates[int(rng.integers(0, len(grasp_candidates)))]
    return StateSnapshot.create(schema.env_id, step=step, values=values,
                                grasped_object=grasped, pointclouds=pointclouds)


class _Pool:
    """Typed expression atoms available in a schema."""

    def __init__(self, schema: sch.EnvironmentSchema):
        self.scalars: list[str] = []
        self.vec3s: list[str] = []
        self.vecns: list[tuple[str, int]] = []
        self.quats: list[str] = []
        self.bools: list[str] = []
        self.pcd_exprs: list[str] = []
        self.bool_calls: list[str] = []
        for path, attr in sch.iter_leaf_paths(schema):
            k = attr.dtype.kind
            if k == "scalar":
                self.scalars.append(path)
            elif k == "vec3":
                self.vec3s.append(path)
            elif k == "vecn":
                self.vecns.append((path, attr.dtype.n))
            elif k == "quat":
                self.quats.append(path)
            elif k == "boolean":
                self.bools.append(path)
            elif k == "pointcloud":
                self.pcd_exprs.append(path)
        entities: list[tuple[str, str]] = [
            (prefix, ent.name) for prefix, ent in iter_entity_paths(schema) if prefix
        ]
        for prefix, ent in iter_entity_paths(schema):
            if not prefix:
                continue
            if ent.method("get_world_pcd") is not None:
                self.pcd_exprs.append(f"{prefix}.get_world_pcd()")
            if ent.method("get_ee_coords") is not None:
                self.pcd_exprs.append(f"{prefix}.get_ee_coords()")
            if ent.method("check_static") is not None:
                self.bool_calls.append(f"{prefix}.check_static()")
            grasp = ent.method("check_grasp")
            if grasp is not None and grasp.params:
                want = grasp.params[0].dtype.entity  # None means any entity
                for target_path, target_kind in entities:
                    if target_path == prefix:
                        continue
                    if want is None or want == target_kind:
                        self.bool_calls.append(f"{prefix}.check_grasp({target_path})")


class ProgramGenerator:
    """Generates small well-typed programs over the builtin grammar."""

    def __init__(self, schema: sch.EnvironmentSchema, rng: np.random.Generator):
        self.schema = schema
        self.rng = rng
        self.pool = _Pool(schema)
        self.action_len = schema.action_dim
        self.locals_scalar: list[str] = []
        self.counter = 0

    def _pick(self, items):
        return items[int(self.rng.integers(0, len(items)))]

    def _lit(self) -> str:
        v = round(float(self.rng.uniform(-3.0, 3.0)), 3)
        return repr(v) if v >= 0 else f"({v!r})"

    def scalar(self, depth: int) -> str:
        r = self.rng.uniform()
        if depth <= 0:
            choices = [self._lit]
            if self.pool.scalars:
                choices.append(lambda: self._pick(self.pool.scalars))
            if self.locals_scalar:
                choices.append(lambda: self._pick(self.locals_scalar))
            return self._pick(choices)()
        if r < 0.28:
            op = self._pick(["+", "-", "*", "/"])
            rhs = self.scalar(depth - 1)
            if op == "/":
                rhs = f"(abs({rhs}) + 0.5)"
            return f"({self.scalar(depth - 1)} {op} {rhs})"
        if r < 0.34 and self.pool.vec3s:
            return f"norm({self.vec3(depth - 1)})"
        if r < 0.40:
            return f"tanh({self.scalar(depth - 1)})"
        if r < 0.46:
            fn = self._pick(["log", "sqrt"])
            return f"{fn}(abs({self.scalar(depth - 1)}) + 0.1)"
        if r < 0.50:
            return f"arccos(clip({self.scalar(depth - 1)}, -1.0, 1.0))"
        if r < 0.56:
            return f"clip({self.scalar(depth - 1)}, -5.0, 5.0)"
        if r < 0.62:
            fn = self._pick(["min", "max"])
            return f"{fn}({self.scalar(depth - 1)}, {self.scalar(depth - 1)})"
        if r < 0.68:
            vec, n = self._vec_any(depth - 1)
            fn = self._pick(["min", "max", "sum", "norm"])
            return f"{fn}({vec})"
        if r < 0.72 and len(self.pool.pcd_exprs) >= 2:
            a = self._pick(self.pool.pcd_exprs)
            b = self._pick(self.pool.pcd_exprs)
            return f"cdist_min({a}, {b})"
        if r < 0.76 and self.pool.pcd_exprs and self.pool.vec3s:
            return f"cdist_min_point({self._pick(self.pool.vec3s)}, {self._pick(self.pool.pcd_exprs)})"
        if r < 0.80 and self.pool.quats:
            return f"quat_angle({self.quat(depth - 1)})"
        if r < 0.86:
            vec, n = self._vec_any(depth - 1)
            idx = int(self.rng.integers(0, n))
            return f"({vec})[{idx}]"
        if r < 0.92:
            return f"({self.scalar(depth - 1)} if {self.boolean(depth - 1)} else {self.scalar(depth - 1)})"
        if r < 0.96:
            return f"(1 - tanh({abs(round(float(self.rng.uniform(0.5, 6.0)), 2))} * abs({self.scalar(depth - 1)})))"
        return f"(-{self.scalar(depth - 1)})"

    def _vec_any(self, depth: int) -> tuple[str, int]:
        opts: list[tuple[str, int]] = [("action", self.action_len)]
        if self.pool.vec3s:
            opts.append((self._pick(self.pool.vec3s), 3))
        for path, n in self.pool.vecns:
            opts.append((path, n))
        return self._pick(opts)

    def vec3(self, depth: int) -> str:
        r = self.rng.uniform()
        if depth <= 0 or not self.pool.vec3s:
            if self.pool.vec3s:
                return self._pick(self.pool.vec3s)
            if self.pool.quats:
                return f"pose_z_axis({self._pick(self.pool.quats)})"
            return "action[0:3]" if self.action_len >= 3 else "action"
        if r < 0.4:
            return f"({self.vec3(depth - 1)} - {self.vec3(depth - 1)})"
        if r < 0.55:
            return f"({self.scalar(depth - 1)} * {self.vec3(depth - 1)})"
        if r < 0.7 and self.pool.quats:
            return f"pose_z_axis({self.quat(depth - 1)})"
        if r < 0.85:
            return f"abs({self.vec3(depth - 1)})"
        return self._pick(self.pool.vec3s)

    def quat(self, depth: int) -> str:
        if depth <= 0 or self.rng.uniform() < 0.5 or not self.pool.quats:
            return self._pick(self.pool.quats)
        if self.rng.uniform() < 0.5:
            return f"quat_inv({self.quat(depth - 1)})"
        return f"quat_mul({self.quat(depth - 1)}, {self.quat(depth - 1)})"

    def boolean(self, depth: int) -> str:
        r = self.rng.uniform()
        if depth <= 0:
            if self.pool.bool_calls and r < 0.5:
                return self._pick(self.pool.bool_calls)
            if self.pool.bools and r < 0.7:
                return self._pick(self.pool.bools)
            return self._pick(["True", "False"])
        if r < 0.4:
            op = self._pick(["<", "<=", ">", ">=", "==", "!="])
            return f"({self.scalar(depth - 1)} {op} {self.scalar(depth - 1)})"
        if r < 0.6:
            op = self._pick(["and", "or"])
            return f"({self.boolean(depth - 1)} {op} {self.boolean(depth - 1)})"
        if r < 0.72:
            return f"(not {self.boolean(depth - 1)})"
        if self.pool.bool_calls:
            return self._pick(self.pool.bool_calls)
        return self._pick(["True", "False"])

    def _fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def generate(self, max_stmts: int = 5, depth: int = 3) -> str:
        self.locals_scalar = []
        self.counter = 0
        lines = ["def compute_dense_reward(action):", "    reward = 0.0"]
        n = int(self.rng.integers(1, max_stmts + 1))
        for _ in range(n):
            r = self.rng.uniform()
            if r < 0.45:
                name = self._fresh()
                lines.append(f"    {name} = {self.scalar(depth)}")
                self.locals_scalar.append(name)
            elif r < 0.75:
                lines.append(f"    reward += {self.scalar(depth)}")
            else:
                cond = self.boolean(depth - 1)
                lines.append(f"    if {cond}:")
                lines.append(f"        reward += {self.scalar(depth - 1)}")
                if self.rng.uniform() < 0.4:
                    lines.append("    else:")
                    lines.append(f"        reward -= {self.scalar(depth - 1)}")
                if self.rng.uniform() < 0.2:
                    lines.append(f"    if {self.boolean(depth - 1)}:")
                    lines.append("        return reward")
        lines.append("    return reward")
        return "\n".join(lines) + "\n"
