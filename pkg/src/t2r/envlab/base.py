"""Environment base class, registry, and the functional façade."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .. import schema as sch
from ..state import StateSnapshot

DT = 0.05                 # seconds per control step
MAX_DELTA = 0.02          # meters of end-effector translation per step at |a|=1
GRASP_RADIUS = 0.015      # attach when gripper center is this close and closing
OPENNESS_RATE = 0.25      # openness change per step at |gripper command|=1
EPISODE_LEN_DEFAULT = 200

ENV_IDS = ("liftcube_lite", "pickcube_lite", "stackcube_lite", "opendrawer_lite", "mover_lite")


def _data_dir() -> Path:
    return Path(resources.files("t2r.envlab") / "data")


@lru_cache(maxsize=None)
def env_schema(env_id: str) -> sch.EnvironmentSchema:
    """Load the shipped schema for an environment id (cached, immutable)."""
    path = _data_dir() / "schemas" / f"{env_id}.json"
    if not path.exists():
        raise KeyError(f"unknown environment '{env_id}'; shipped: {', '.join(ENV_IDS)}")
    return sch.load_schema(path)


class DeskEnv:
    """One environment instance: seeded, single-threaded, stepped in place.

    Subclasses implement _do_reset/_do_step/_snapshot and the success
    predicate. Trajectories are bit-deterministic in (seed, action sequence).
    """

    env_id: str = ""
    success_mode: str = "any"  # 'any': success if predicate held at any step; 'final': last step only

    def __init__(self, episode_len: int = EPISODE_LEN_DEFAULT):
        self.schema = env_schema(self.env_id)
        self.action_dim = self.schema.action_dim
        self.episode_len = int(episode_len)
        self.step_idx = 0
        self._auto_seed = 0

    # --- api ---

    def reset(self, seed: int | None = None) -> StateSnapshot:
        if seed is None:
            seed = self._auto_seed
            self._auto_seed += 1
        rng = np.random.default_rng(int(seed))
        self.step_idx = 0
        self._do_reset(rng)
        return self._snapshot()

    def step(self, action) -> StateSnapshot:
        action = np.asarray(action, dtype=np.float64)
        if action.shape != (self.action_dim,):
            raise ValueError(f"action must have shape ({self.action_dim},), got {action.shape}")
        if self.step_idx >= self.episode_len:
            raise RuntimeError("episode is over; call reset()")
        action = np.clip(action, self.schema.action_low, self.schema.action_high)
        self._do_step(action)
        self.step_idx += 1
        return self._snapshot()

    @property
    def done(self) -> bool:
        return self.step_idx >= self.episode_len

    def success(self, snapshot: StateSnapshot) -> bool:
        raise NotImplementedError

    def frame(self, snapshot: StateSnapshot, reward: float, success: bool) -> dict:
        """One playback-log row: positions, gripper state, reward, success."""
        raise NotImplementedError

    # --- subclass hooks ---

    def _do_reset(self, rng: np.random.Generator) -> None:
        raise NotImplementedError

    def _do_step(self, action: np.ndarray) -> None:
        raise NotImplementedError

    def _snapshot(self) -> StateSnapshot:
        raise NotImplementedError


_REGISTRY: dict[str, type] = {}


def register(cls: type) -> type:
    _REGISTRY[cls.env_id] = cls
    return cls


def make_env(env_id: str, episode_len: int = EPISODE_LEN_DEFAULT) -> DeskEnv:
    from . import manip, mover  # noqa: F401  (populate the registry)

    if env_id not in _REGISTRY:
        raise KeyError(f"unknown environment '{env_id}'; shipped: {', '.join(ENV_IDS)}")
    return _REGISTRY[env_id](episode_len=episode_len)


# functional façade mirroring the module's operation contracts

def reset(env: DeskEnv, seed: int | None = None) -> StateSnapshot:
    return env.reset(seed)


def step(env: DeskEnv, action) -> StateSnapshot:
    return env.step(action)


def success(env: DeskEnv, snapshot: StateSnapshot) -> bool:
    return env.success(snapshot)
