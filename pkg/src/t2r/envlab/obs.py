"""Flat observation vectors assembled from snapshots.

Layouts are fixed per environment and versioned; training checkpoints echo
the version so stale policies cannot be silently evaluated against a
different layout.

liftcube_lite (19): ee_pos(3) openness(1) qvel(4) cube_pos(3) cube-ee(3)
    grasped(1) cube_vel(3) lift_gap(1 = goal_height+half - cube_z)
pickcube_lite (21): ee_pos(3) openness(1) qvel(4) cube_pos(3) cube-ee(3)
    grasped(1) goal(3) goal-cube(3)
stackcube_lite (24): ee_pos(3) openness(1) qvel(4) cubeA(3) cubeA-ee(3)
    graspedA(1) cubeB(3) stack_target-cubeA(3) cubeA_vel(3)
opendrawer_lite (17): ee_pos(3) openness(1) qvel(4) handle(3) handle-ee(3)
    qpos(1) target_qpos(1) attached(1)
mover_lite (10): z(1) pitch(1) vx(1) vz(1) joint_angles(3) joint_omegas(3)
"""

from __future__ import annotations

import numpy as np

from ..state import StateSnapshot

OBS_LAYOUT_VERSION = 1

_DIMS = {
    "liftcube_lite": 19,
    "pickcube_lite": 21,
    "stackcube_lite": 24,
    "opendrawer_lite": 17,
    "mover_lite": 10,
}


def obs_dim(env_id: str) -> int:
    return _DIMS[env_id]


def _gripper_common(s: StateSnapshot) -> list[np.ndarray]:
    return [
        np.asarray(s.value("robot.ee_pose.p")),
        np.array([float(s.value("robot.gripper_openness"))]),
        np.asarray(s.value("robot.qvel")),
    ]


def snapshot_to_obs(env_id: str, s: StateSnapshot) -> np.ndarray:
    if env_id == "liftcube_lite":
        ee = np.asarray(s.value("robot.ee_pose.p"))
        cube = np.asarray(s.value("cubeA.pose.p"))
        gap = float(s.value("goal_height")) + float(s.value("cube_half_size")) - cube[2]
        parts = _gripper_common(s) + [
            cube, cube - ee,
            np.array([1.0 if s.grasped_object == "cubeA" else 0.0]),
            np.asarray(s.value("cubeA.velocity")),
            np.array([gap]),
        ]
    elif env_id == "pickcube_lite":
        ee = np.asarray(s.value("robot.ee_pose.p"))
        cube = np.asarray(s.value("cubeA.pose.p"))
        goal = np.asarray(s.value("goal_position"))
        parts = _gripper_common(s) + [
            cube, cube - ee,
            np.array([1.0 if s.grasped_object == "cubeA" else 0.0]),
            goal, goal - cube,
        ]
    elif env_id == "stackcube_lite":
        ee = np.asarray(s.value("robot.ee_pose.p"))
        a = np.asarray(s.value("cubeA.pose.p"))
        b = np.asarray(s.value("cubeB.pose.p"))
        target = b + np.array([0.0, 0.0, 2 * float(s.value("cube_half_size"))])
        parts = _gripper_common(s) + [
            a, a - ee,
            np.array([1.0 if s.grasped_object == "cubeA" else 0.0]),
            b, target - a,
            np.asarray(s.value("cubeA.velocity")),
        ]
    elif env_id == "opendrawer_lite":
        ee = np.asarray(s.value("robot.ee_pose.p"))
        handle = np.asarray(s.value("cabinet.handle.pose.p"))
        parts = _gripper_common(s) + [
            handle, handle - ee,
            np.array([float(s.value("cabinet.handle.qpos"))]),
            np.array([float(s.value("cabinet.handle.target_qpos"))]),
            np.array([1.0 if s.grasped_object == "cabinet.handle" else 0.0]),
        ]
    elif env_id == "mover_lite":
        parts = [
            np.array([float(s.value("trunk.position_z"))]),
            np.array([float(s.value("trunk.pitch"))]),
            np.array([float(s.value("trunk.velocity_x"))]),
            np.array([float(s.value("trunk.velocity_z"))]),
            np.array([float(s.value(f"joint{i + 1}.angle")) for i in range(3)]),
            np.array([float(s.value(f"joint{i + 1}.angular_velocity")) for i in range(3)]),
        ]
    else:
        raise KeyError(f"unknown environment '{env_id}'")
    obs = np.concatenate(parts).astype(np.float64)
    assert obs.shape == (_DIMS[env_id],), (env_id, obs.shape)
    return obs
