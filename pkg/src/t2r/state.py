"""Immutable per-step environment state consumed by reward programs.

Values are stored flat, keyed by dotted schema path ("cubeA.pose.p"); only
leaf attributes appear. Point clouds returned by get_world_pcd-style methods
live in a side table keyed by the owning entity path, and the grasp registry
records which object (if any) the robot currently holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import schema as sch

__all__ = ["StateSnapshot", "check_conformance", "ConformanceError"]


class ConformanceError(Exception):
    pass


def _freeze(values: dict) -> Mapping:
    frozen = {}
    for k, v in values.items():
        if isinstance(v, np.ndarray):
            v = np.array(v, dtype=np.float64)
            v.setflags(write=False)
        elif isinstance(v, bool):
            pass
        else:
            v = float(v)
        frozen[k] = v
    return MappingProxyType(frozen)


@dataclass(frozen=True)
class StateSnapshot:
    env_id: str
    step: int
    values: Mapping[str, object]
    grasped_object: str | None = None
    pointclouds: Mapping[str, np.ndarray] = field(default_factory=dict)

    @staticmethod
    def create(
        env_id: str,
        step: int,
        values: dict,
        grasped_object: str | None = None,
        pointclouds: dict | None = None,
    ) -> "StateSnapshot":
        pcds = {}
        for k, v in (pointclouds or {}).items():
            arr = np.array(v, dtype=np.float64)
            arr.setflags(write=False)
            pcds[k] = arr
        return StateSnapshot(
            env_id=env_id,
            step=step,
            values=_freeze(values),
            grasped_object=grasped_object,
            pointclouds=MappingProxyType(pcds),
        )

    def value(self, path: str):
        try:
            return self.values[path]
        except KeyError:
            raise KeyError(f"snapshot for {self.env_id} has no value at '{path}'") from None


def _dtype_matches(dt: sch.Dtype, value) -> str | None:
    """Return an error string if `value` does not fit `dt`, else None."""
    if dt.kind == "boolean":
        return None if isinstance(value, (bool, np.bool_)) else f"expected bool, got {type(value).__name__}"
    if dt.kind == "scalar":
        if isinstance(value, (bool, np.bool_)):
            return "expected scalar, got bool"
        if not isinstance(value, (int, float, np.floating)):
            return f"expected scalar, got {type(value).__name__}"
        return None if np.isfinite(float(value)) else "non-finite scalar"
    if not isinstance(value, np.ndarray):
        return f"expected ndarray, got {type(value).__name__}"
    if not np.all(np.isfinite(value)):
        return "non-finite entries"
    if dt.kind == "pointcloud":
        if value.ndim != 2 or value.shape[1] != 3 or value.shape[0] < 1:
            return f"expected (N,3) point cloud, got shape {value.shape}"
        return None
    want = dt.vector_length()
    if value.shape != (want,):
        return f"expected shape ({want},), got {value.shape}"
    if dt.kind == "quat" and abs(np.linalg.norm(value) - 1.0) > 1e-6:
        return f"quaternion not unit-norm: |q|={np.linalg.norm(value):.8f}"
    return None


def check_conformance(snapshot: StateSnapshot, schema: sch.EnvironmentSchema) -> None:
    """Verify the snapshot carries exactly the schema's leaf attributes with
    matching dtypes/shapes, finite values, unit quaternions, and respected
    const pins. Raises ConformanceError listing every violation."""
    problems: list[str] = []
    expected: set[str] = set()
    for path, attr in sch.iter_leaf_paths(schema):
        expected.add(path)
        if path not in snapshot.values:
            problems.append(f"missing value for '{path}'")
            continue
        value = snapshot.values[path]
        err = _dtype_matches(attr.dtype, value)
        if err:
            problems.append(f"'{path}': {err}")
        if attr.const is not None and err is None and float(value) != float(attr.const):
            problems.append(f"'{path}': const attribute expected {attr.const}, got {value}")
    for key in snapshot.values:
        if key not in expected:
            problems.append(f"unexpected value '{key}' not in schema")
    if snapshot.step < 0:
        problems.append(f"negative step index {snapshot.step}")
    if problems:
        raise ConformanceError(
            f"snapshot does not conform to schema '{schema.env_id}': " + "; ".join(problems)
        )
