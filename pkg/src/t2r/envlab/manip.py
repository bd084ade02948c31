"""Kinematic tabletop manipulation environments.

A floating gripper moves by end-effector position deltas (2 cm/step at full
command). Grasping is a boolean attachment: when the gripper center is within
the grasp radius of an object and the gripper command closes, the object
attaches and tracks the end-effector with a constant offset until an opening
command. Ungrasped cubes fall kinematically until supported by the table or
another cube. Velocities are finite differences.
"""

from __future__ import annotations

import numpy as np

from ..state import StateSnapshot
from .base import (
    DT,
    GRASP_RADIUS,
    MAX_DELTA,
    OPENNESS_RATE,
    DeskEnv,
    register,
)

_IDENTITY_Q = np.array([1.0, 0.0, 0.0, 0.0])
_WS_LOW = np.array([-0.25, -0.25, 0.0])
_WS_HIGH = np.array([0.25, 0.25, 0.4])
HALF = 0.02               # cube half size, meters
FALL_RATE = 0.05          # meters per step for unsupported objects
STACK_REST_XY = 0.03      # xy distance under which a falling cube rests on another


class _GripperEnv(DeskEnv):
    """Shared gripper kinematics and snapshot plumbing."""

    def _reset_robot(self, rng: np.random.Generator) -> None:
        self.ee = np.array([
            rng.uniform(-0.05, 0.05),
            rng.uniform(-0.05, 0.05),
            rng.uniform(0.10, 0.20),
        ])
        self.openness = 1.0
        self._prev_qpos = self._qpos()
        self.attached: str | None = None
        self._attach_offset = np.zeros(3)

    def _qpos(self) -> np.ndarray:
        return np.array([self.ee[0], self.ee[1], self.ee[2], self.openness])

    def _qvel(self) -> np.ndarray:
        return (self._qpos() - self._prev_qpos) / DT

    def _move_gripper(self, action: np.ndarray) -> np.ndarray:
        """Apply the translation + gripper channels; returns the realized ee delta."""
        self._prev_qpos = self._qpos()
        before = self.ee.copy()
        self.ee = np.clip(self.ee + MAX_DELTA * action[:3], _WS_LOW, _WS_HIGH)
        self.openness = float(np.clip(self.openness + OPENNESS_RATE * action[3], 0.0, 1.0))
        return self.ee - before

    def _robot_values(self) -> dict:
        return {
            "robot.ee_pose.p": self.ee.copy(),
            "robot.ee_pose.q": _IDENTITY_Q.copy(),
            "robot.qpos": self._qpos(),
            "robot.qvel": self._qvel(),
            "robot.gripper_openness": self.openness,
        }


class _CubeEnv(_GripperEnv):
    """Cube attachment, release, and falling shared by the cube tasks."""

    cube_names: tuple[str, ...] = ("cubeA",)

    def _reset_cubes(self, rng: np.random.Generator, min_separation: float = 0.06) -> None:
        self.cubes: dict[str, np.ndarray] = {}
        self._prev_cubes: dict[str, np.ndarray] = {}
        while True:
            for name in self.cube_names:
                self.cubes[name] = np.array([
                    rng.uniform(-0.10, 0.10), rng.uniform(-0.10, 0.10), HALF,
                ])
            if len(self.cube_names) < 2:
                break
            a, b = (self.cubes[n] for n in self.cube_names[:2])
            if np.linalg.norm(a[:2] - b[:2]) >= min_separation:
                break
        self._prev_cubes = {k: v.copy() for k, v in self.cubes.items()}

    def _cube_step(self, action: np.ndarray) -> None:
        """Grasp/release transitions plus attached tracking and falling."""
        self._prev_cubes = {k: v.copy() for k, v in self.cubes.items()}
        delta = self._move_gripper(action)
        closing = action[3] < 0.0
        opening = action[3] > 0.0

        if self.attached is not None:
            if opening:
                self.attached = None
            else:
                self.cubes[self.attached] = self.ee + self._attach_offset
        if self.attached is None and closing:
            for name in self.cube_names:
                if np.linalg.norm(self.cubes[name] - self.ee) <= GRASP_RADIUS:
                    self.attached = name
                    self._attach_offset = self.cubes[name] - self.ee
                    self.cubes[name] = self.ee + self._attach_offset
                    break
        self._settle()

    def _support_height(self, name: str) -> float:
        """Resting height for a falling cube: table, or atop another cube."""
        pos = self.cubes[name]
        rest = HALF
        for other, opos in self.cubes.items():
            if other == name or other == self.attached:
                continue
            if np.linalg.norm(pos[:2] - opos[:2]) <= STACK_REST_XY and pos[2] >= opos[2]:
                rest = max(rest, opos[2] + 2 * HALF)
        return rest

    def _settle(self) -> None:
        for name in self.cube_names:
            if name == self.attached:
                continue
            rest = self._support_height(name)
            z = self.cubes[name][2]
            if z > rest:
                self.cubes[name][2] = max(rest, z - FALL_RATE)

    def _cube_values(self) -> dict:
        values = {}
        for name in self.cube_names:
            values[f"{name}.pose.p"] = self.cubes[name].copy()
            values[f"{name}.pose.q"] = _IDENTITY_Q.copy()
            values[f"{name}.velocity"] = (self.cubes[name] - self._prev_cubes[name]) / DT
        return values

    def frame(self, snapshot: StateSnapshot, reward: float, success: bool) -> dict:
        positions = {"ee": list(map(float, snapshot.value("robot.ee_pose.p")))}
        for name in self.cube_names:
            positions[name] = list(map(float, snapshot.value(f"{name}.pose.p")))
        return {
            "step": snapshot.step,
            "positions": positions,
            "gripper": float(snapshot.value("robot.gripper_openness")),
            "grasped": snapshot.grasped_object,
            "reward": float(reward),
            "success": bool(success),
        }


@register
class LiftCubeLite(_CubeEnv):
    env_id = "liftcube_lite"
    cube_names = ("cubeA",)

    def _do_reset(self, rng) -> None:
        self._reset_robot(rng)
        self._reset_cubes(rng)

    def _do_step(self, action) -> None:
        self._cube_step(action)

    def _snapshot(self) -> StateSnapshot:
        values = {"cube_half_size": HALF, "goal_height": 0.2}
        values.update(self._robot_values())
        values.update(self._cube_values())
        return StateSnapshot.create(self.env_id, self.step_idx, values, grasped_object=self.attached)

    def success(self, snapshot) -> bool:
        z = float(snapshot.value("cubeA.pose.p")[2])
        lifted = z >= float(snapshot.value("goal_height")) + float(snapshot.value("cube_half_size"))
        static = float(np.max(np.abs(snapshot.value("robot.qvel")))) <= 0.2
        return lifted and static


@register
class PickCubeLite(_CubeEnv):
    env_id = "pickcube_lite"
    cube_names = ("cubeA",)

    def _do_reset(self, rng) -> None:
        self._reset_robot(rng)
        self._reset_cubes(rng)
        self.goal = np.array([
            rng.uniform(-0.10, 0.10), rng.uniform(-0.10, 0.10), rng.uniform(0.10, 0.25),
        ])

    def _do_step(self, action) -> None:
        self._cube_step(action)

    def _snapshot(self) -> StateSnapshot:
        values = {"cube_half_size": HALF, "goal_position": self.goal.copy()}
        values.update(self._robot_values())
        values.update(self._cube_values())
        return StateSnapshot.create(self.env_id, self.step_idx, values, grasped_object=self.attached)

    def success(self, snapshot) -> bool:
        dist = float(np.linalg.norm(snapshot.value("goal_position") - snapshot.value("cubeA.pose.p")))
        static = float(np.max(np.abs(snapshot.value("robot.qvel")))) <= 0.2
        return dist <= 0.025 and static

    def frame(self, snapshot, reward, success) -> dict:
        out = super().frame(snapshot, reward, success)
        out["positions"]["goal"] = list(map(float, snapshot.value("goal_position")))
        return out


@register
class StackCubeLite(_CubeEnv):
    env_id = "stackcube_lite"
    cube_names = ("cubeA", "cubeB")

    def _do_reset(self, rng) -> None:
        self._reset_robot(rng)
        self._reset_cubes(rng)

    def _do_step(self, action) -> None:
        self._cube_step(action)

    def _snapshot(self) -> StateSnapshot:
        values = {"cube_half_size": HALF}
        values.update(self._robot_values())
        values.update(self._cube_values())
        return StateSnapshot.create(self.env_id, self.step_idx, values, grasped_object=self.attached)

    def success(self, snapshot) -> bool:
        target = snapshot.value("cubeB.pose.p") + np.array([0.0, 0.0, 2 * HALF])
        on_target = float(np.linalg.norm(snapshot.value("cubeA.pose.p") - target)) <= 0.025
        static = float(np.linalg.norm(snapshot.value("cubeA.velocity"))) <= 0.2
        grasped = snapshot.grasped_object == "cubeA"
        return on_target and static and not grasped


@register
class OpenDrawerLite(_GripperEnv):
    env_id = "opendrawer_lite"

    QPOS_LIMIT = 0.2
    TARGET_QPOS = 0.15
    PCD_POINTS = 64
    BAR_HALF_LEN = 0.04   # 8 cm bar

    def _do_reset(self, rng) -> None:
        self._reset_robot(rng)
        self.base = np.array([rng.uniform(0.12, 0.18), rng.uniform(-0.05, 0.05), 0.10])
        self.qpos = float(rng.uniform(0.0, 0.02))
        self._prev_qpos_joint = self.qpos
        # fixed local point cloud: random sample along the handle bar
        offsets_y = rng.uniform(-self.BAR_HALF_LEN, self.BAR_HALF_LEN, size=self.PCD_POINTS)
        self._pcd_local = np.stack(
            [np.zeros(self.PCD_POINTS), offsets_y, np.zeros(self.PCD_POINTS)], axis=1
        )
        self.attached = None
        self._attach_offset = np.zeros(3)

    def _handle_center(self) -> np.ndarray:
        return self.base + np.array([self.qpos, 0.0, 0.0])

    def _do_step(self, action) -> None:
        self._prev_qpos_joint = self.qpos
        prev_center = self._handle_center()
        if self.attached is not None:
            # hand is constrained to the slide axis; x channel drives the joint
            self._prev_qpos = self._qpos()
            self.qpos = float(np.clip(self.qpos + MAX_DELTA * action[0], 0.0, self.QPOS_LIMIT))
            self.openness = float(np.clip(self.openness + OPENNESS_RATE * action[3], 0.0, 1.0))
            self.ee = self._handle_center() + self._attach_offset
            if action[3] > 0.0:
                self.attached = None
        else:
            self._move_gripper(action)
            if action[3] < 0.0 and np.linalg.norm(self._handle_center() - self.ee) <= GRASP_RADIUS:
                self.attached = "cabinet.handle"
                self._attach_offset = self.ee - self._handle_center()
        self._handle_vel = (self._handle_center() - prev_center) / DT

    def _snapshot(self) -> StateSnapshot:
        if not hasattr(self, "_handle_vel"):
            self._handle_vel = np.zeros(3)
        center = self._handle_center()
        values = {
            "cabinet.handle.pose.p": center.copy(),
            "cabinet.handle.pose.q": _IDENTITY_Q.copy(),
            "cabinet.handle.velocity": self._handle_vel.copy(),
            "cabinet.handle.qpos": self.qpos,
            "cabinet.handle.qvel": (self.qpos - self._prev_qpos_joint) / DT,
            "cabinet.handle.target_qpos": self.TARGET_QPOS,
            "cabinet.velocity": np.zeros(3),
        }
        values.update(self._robot_values())
        return StateSnapshot.create(
            self.env_id, self.step_idx, values,
            grasped_object=self.attached,
            pointclouds={"cabinet.handle": self._pcd_local + center},
        )

    def success(self, snapshot) -> bool:
        return float(snapshot.value("cabinet.handle.qpos")) >= float(snapshot.value("cabinet.handle.target_qpos"))

    def frame(self, snapshot, reward, success) -> dict:
        return {
            "step": snapshot.step,
            "positions": {
                "ee": list(map(float, snapshot.value("robot.ee_pose.p"))),
                "handle": list(map(float, snapshot.value("cabinet.handle.pose.p"))),
            },
            "gripper": float(snapshot.value("robot.gripper_openness")),
            "grasped": snapshot.grasped_object,
            "qpos": float(snapshot.value("cabinet.handle.qpos")),
            "target_qpos": float(snapshot.value("cabinet.handle.target_qpos")),
            "reward": float(reward),
            "success": bool(success),
        }
