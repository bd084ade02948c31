"""Planar 3-joint locomotion body standing in for legged-robot tasks.

Torques integrate into joint angular velocities (first integration) whose
mean couples into forward trunk velocity, integrated again into position: a
double-integrator with damping. Success is a programmatic proxy: mean forward
velocity over the episode of at least 0.5 m/s, judged at the final step.
"""

from __future__ import annotations

import numpy as np

from ..state import StateSnapshot
from .base import DT, DeskEnv, register

TORQUE_GAIN = 8.0
JOINT_DAMPING = 1.0
FORWARD_COUPLING = 0.4
SUCCESS_MEAN_VX = 0.5
Z_BASE = 0.5
Z_AMPLITUDE = 0.15


@register
class MoverLite(DeskEnv):
    env_id = "mover_lite"
    success_mode = "final"

    def _do_reset(self, rng) -> None:
        self.omega = rng.uniform(-0.1, 0.1, size=3)
        self.theta = rng.uniform(-0.2, 0.2, size=3)
        self.x = 0.0
        self.vx = 0.0
        self.pitch = float(rng.uniform(-0.05, 0.05))
        self.z = Z_BASE + Z_AMPLITUDE * float(np.sin(self.theta[1]))
        self._prev_z = self.z

    def _do_step(self, action) -> None:
        self._prev_z = self.z
        self.omega = self.omega + DT * (TORQUE_GAIN * action - JOINT_DAMPING * self.omega)
        self.theta = self.theta + DT * self.omega
        self.vx = FORWARD_COUPLING * float(np.mean(self.omega))
        self.x += DT * self.vx
        omega_pitch = 0.5 * float(self.omega[0] - self.omega[2])
        self.pitch += DT * omega_pitch
        self.z = Z_BASE + Z_AMPLITUDE * float(np.sin(self.theta[1]))

    def _snapshot(self) -> StateSnapshot:
        values = {
            "trunk.position_x": self.x,
            "trunk.position_z": self.z,
            "trunk.velocity_x": self.vx,
            "trunk.velocity_z": (self.z - self._prev_z) / DT,
            "trunk.pitch": self.pitch,
            "trunk.angular_velocity": 0.5 * float(self.omega[0] - self.omega[2]),
        }
        for i in range(3):
            values[f"joint{i + 1}.angle"] = float(self.theta[i])
            values[f"joint{i + 1}.angular_velocity"] = float(self.omega[i])
        return StateSnapshot.create(self.env_id, self.step_idx, values)

    def mean_forward_velocity(self, snapshot: StateSnapshot) -> float:
        if snapshot.step == 0:
            return 0.0
        return float(snapshot.value("trunk.position_x")) / (snapshot.step * DT)

    def success(self, snapshot) -> bool:
        return self.mean_forward_velocity(snapshot) >= SUCCESS_MEAN_VX

    def frame(self, snapshot, reward, success) -> dict:
        return {
            "step": snapshot.step,
            "positions": {
                "trunk": [float(snapshot.value("trunk.position_x")), 0.0,
                          float(snapshot.value("trunk.position_z"))],
            },
            "pitch": float(snapshot.value("trunk.pitch")),
            "joints": [float(snapshot.value(f"joint{i + 1}.angle")) for i in range(3)],
            "mean_vx": self.mean_forward_velocity(snapshot),
            "reward": float(reward),
            "success": bool(success),
        }
